//! Local orbital integrals of the relative trace formula for the test function
//! built from a type-1 minimal vector, and the archimedean closed form.

use crate::cuspidal::{Coefficient, CuspidalDatum};
use crate::error::{Error, Result};
use crate::padic::Padic;
use crate::phase::rational_to_f64;
use crate::quad::QuadElem;
use crate::quaternion::{solve_norm, QuatElem, Side, TorusEmbedding};
use crate::report::{ser_complex, ser_rational};
use crate::waldspurger::{align_torus, start_depth, PeriodProblem, MAX_CELLS};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// `f = Φ̄ / Vol(Z\ZB¹)` restricted to `ZB¹`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    datum: CuspidalDatum,
    vol: Rational64,
}

impl TestFunction {
    pub fn new(datum: CuspidalDatum) -> Result<TestFunction> {
        if datum.side() != Side::Matrix {
            return Err(Error::NotApplicable("test functions are built on the matrix side"));
        }
        let q = datum.ctx().q();
        let n = datum.n() as u32;
        let qq = Rational64::from_integer(q * q - 1);
        let qp = |k: i64| Rational64::from_integer(q).pow(k as i32);
        let vol = match datum.case_index() {
            1 => qp(1 - 2 * n as i64) / qq,
            2 => qp(-2 * n as i64) / qq,
            _ => qp(1 - n as i64) / qq,
        };
        Ok(TestFunction { datum, vol })
    }

    pub fn datum(&self) -> &CuspidalDatum {
        &self.datum
    }

    /// `Vol(Z\ZB¹)` for `Vol(PGL₂(Z_p)) = 1`.
    pub fn volume(&self) -> Rational64 {
        self.vol
    }

    pub fn eval(&self, g: &QuatElem) -> Result<Complex64> {
        if self.datum.zb1_membership(g).is_none() {
            return Ok(Complex64::zero());
        }
        match self.datum.matrix_coefficient(g)? {
            Coefficient::Value(ph) => Ok(ph.to_complex().conj() / rational_to_f64(self.vol)),
            _ => Err(Error::OutsideDomain),
        }
    }
}

/// An aligned torus `E ⊂ B`, the test function, and `j ∈ E^⊥` with `v(j²) ∈ {0, 1}`.
#[derive(Clone, Debug)]
pub struct OrbitalSetup {
    pub tf: TestFunction,
    pub pb: PeriodProblem,
    pub emb: TorusEmbedding,
    pub j: QuatElem,
    /// `c(π_χ) − c(π)`.
    pub m: i32,
}

impl OrbitalSetup {
    pub fn new(pb: PeriodProblem) -> Result<OrbitalSetup> {
        let tf = TestFunction::new(pb.datum().clone())?;
        let emb = align_torus(&pb)?.emb;
        let comm = pb.datum().alpha_quat().commutator(&emb.beta);
        let mut j = if comm.norm().is_zero() { emb.j_e } else { comm };
        let v = j.norm().v();
        j = j.scale(j.l().ctx().pi_pow(-v.div_euclid(2)));
        let m = pb.chi().conductor_pi() - pb.datum().c_pi();
        Ok(OrbitalSetup { tf, pb, emb, j, m })
    }

    /// `ξ = −Nm(j x)`.
    pub fn xi(&self, x: &QuadElem) -> Padic {
        -(self.j * self.emb.image(x)).norm()
    }

    /// Some `x ∈ E` with `−Nm(j x) = ξ`.
    pub fn point_for(&self, xi: &Padic) -> Result<QuadElem> {
        solve_norm(&self.pb.e(), &(*xi / self.j_square()))
    }

    pub fn j_square(&self) -> Padic {
        -self.j.norm()
    }

    fn chi_phase(&self, t: &QuadElem) -> Result<Complex64> {
        Ok(self.pb.chi().eval(t)?.to_complex())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitalResult {
    pub xi: String,
    pub v_xi: Option<i32>,
    /// `v(1 − ξ)`.
    pub d: Option<i32>,
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    /// Volume of `{(e, e′) : e(1 + jxe′) ∈ ZB¹}`.
    #[serde(serialize_with = "ser_rational")]
    pub support_volume: Rational64,
    pub depth: (u32, u32),
    /// `log_q Vol(S) + (c(π) + d + m)/2` when `d > 0` and the support is nonempty.
    pub envelope: Option<f64>,
    /// `log_q |I|` when `I ≠ 0`.
    pub log_abs: Option<f64>,
}

const STABLE_TOL: f64 = 1e-9;
const ORBITAL_CELLS: usize = 4_000_000;

fn log_q(z: Complex64, q: i64) -> Option<f64> {
    (z.norm() > 1e-12).then(|| z.norm().ln() / (q as f64).ln())
}

fn val_or_none(x: &Padic) -> Option<i32> {
    (!x.is_zero()).then(|| x.v())
}

/// `I(0, f) = ∫ f(t) χ(t) dt`, equal to `Vol(Z\ZB¹)⁻¹` times the period integral.
pub fn orbital_zero(s: &OrbitalSetup) -> Result<OrbitalResult> {
    let e = s.pb.e();
    let mut prev: Option<(Complex64, Rational64)> = None;
    let mut m = start_depth(&s.pb);
    loop {
        let reps = e.coset_reps(m)?;
        if reps.len() > MAX_CELLS {
            return Err(Error::DepthUnstable);
        }
        let mut acc = Complex64::zero();
        let mut supp = Rational64::zero();
        for (t, w) in &reps {
            let f = s.tf.eval(&s.emb.image(t))?;
            if f.norm() > 0.0 {
                acc += f * s.chi_phase(t)? * rational_to_f64(*w);
                supp += *w;
            }
        }
        if let Some((v0, s0)) = prev {
            if (acc - v0).norm() <= STABLE_TOL * acc.norm().max(1.0) && s0 == supp {
                return Ok(OrbitalResult {
                    xi: "0".into(),
                    v_xi: None,
                    d: Some(0),
                    value: acc,
                    support_volume: supp,
                    depth: (m, 0),
                    envelope: None,
                    log_abs: log_q(acc, e.ctx().q()),
                });
            }
        }
        prev = Some((acc, supp));
        m += 1;
    }
}

/// Smallest `k` with `F^×U_E(k) ⊂ ZB¹`, certified on the classes at depth `m`.
fn coarse_depth(s: &OrbitalSetup, m: u32) -> Result<u32> {
    let e = s.pb.e();
    let reps = e.coset_reps(m)?;
    for k in 1..m {
        let unit = e.class_key(&e.one(), k)?;
        let mut ok = true;
        for (t, _) in &reps {
            if e.class_key(t, k)? == unit && s.tf.datum().zb1_membership(&s.emb.image(t)).is_none() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(k);
        }
    }
    Ok(m)
}

fn double_sum(s: &OrbitalSetup, x: &QuadElem, m1: u32, m2: u32) -> Result<(Complex64, Rational64)> {
    let e = s.pb.e();
    let total = e.total_volume();
    let mut merged: BTreeMap<(i128, i128), (QuadElem, Rational64)> = BTreeMap::new();
    for (z, w) in e.coset_reps(m2)? {
        let ep = z.norm_one_map()?;
        let key = (ep.a.mod_pk(m2)?, ep.b.mod_pk(m2)?);
        merged.entry(key).or_insert((ep, Rational64::zero())).1 += w / total;
    }
    let circle: Vec<(QuadElem, Rational64)> = merged.into_values().collect();
    // The support in `e` is stable under `ZB¹ ∩ E^×`, so one membership test per coarse class suffices.
    let k0 = coarse_depth(s, m1.min(m2))?;
    let mut classes: BTreeMap<(u8, i128), Vec<(QuatElem, Rational64, Complex64)>> = BTreeMap::new();
    for (t, w) in e.coset_reps(m1)? {
        let ch = s.chi_phase(&t)?;
        classes.entry(e.class_key(&t, k0)?).or_default().push((s.emb.image(&t), w, ch));
    }
    let jx = s.j * s.emb.image(x);
    let one = s.emb.image(&e.one());
    circle
        .par_iter()
        .map(|(ep, w2)| -> Result<(Complex64, Rational64)> {
            let g1 = one + jx * s.emb.image(ep);
            let mut acc = Complex64::zero();
            let mut supp = Rational64::zero();
            for cell in classes.values() {
                if s.tf.datum().zb1_membership(&(cell[0].0 * g1)).is_none() {
                    continue;
                }
                for (t, w1, ch) in cell {
                    let f = s.tf.eval(&(*t * g1))?;
                    if f.norm() > 0.0 {
                        acc += f * ch * rational_to_f64(*w1 * *w2);
                        supp += *w1 * *w2;
                    }
                }
            }
            Ok((acc, supp))
        })
        .collect::<Result<Vec<_>>>()
        .map(|parts| {
            parts.into_iter().fold((Complex64::zero(), Rational64::zero()), |a, b| (a.0 + b.0, a.1 + b.1))
        })
}

/// `I(ξ, f) = ∫_{F^×\E^×} ∫_{E¹} f(e(1 + jxe′)) χ(e) de′ de` with `Vol(E¹) = 1`,
/// certified by refining each variable separately.
pub fn orbital_xi(s: &OrbitalSetup, x: &QuadElem) -> Result<OrbitalResult> {
    let e = s.pb.e();
    if !e.is_field() {
        return Err(Error::NotApplicable("orbital integrals need E a field"));
    }
    let xi = s.xi(x);
    if xi.is_zero() {
        return Err(Error::ZeroInput);
    }
    let one = xi.ctx().one();
    let m = start_depth(&s.pb);
    let cells = |k: u32| e.coset_reps(k).map(|r| r.len()).unwrap_or(usize::MAX);
    if cells(m + 1).saturating_mul(cells(m)) > ORBITAL_CELLS {
        return Err(Error::DepthUnstable);
    }
    let (v0, s0) = double_sum(s, x, m, m)?;
    let (v1, s1) = double_sum(s, x, m + 1, m)?;
    let (v2, s2) = double_sum(s, x, m, m + 1)?;
    let scale = v0.norm().max(1.0);
    if (v1 - v0).norm() > STABLE_TOL * scale || (v2 - v0).norm() > STABLE_TOL * scale || s1 != s0 || s2 != s0 {
        return Err(Error::DepthUnstable);
    }
    let d = val_or_none(&(one - xi));
    let q = e.ctx().q() as f64;
    let envelope = match d {
        Some(d) if d > 0 && !s0.is_zero() => {
            Some(rational_to_f64(s0).ln() / q.ln() + (s.pb.datum().c_pi() + d + s.m) as f64 / 2.0)
        }
        _ => None,
    };
    Ok(OrbitalResult {
        xi: format!("{xi}"),
        v_xi: val_or_none(&xi),
        d,
        value: v0,
        support_volume: s0,
        depth: (m, m),
        envelope,
        log_abs: log_q(v0, e.ctx().q()),
    })
}

/// `(1 − ξ)^{−(k−1)} ∑_{i=0}^{k−|m|−1} C(k+m−1, i) C(k−m−1, i) (−ξ)^i` with
/// `Vol(F^×\E^×) = 1`, exactly.
pub fn archimedean_orbital_exact(k: i64, m: i64, xi: Rational64) -> Result<Rational64> {
    if !(k > m.abs() && m.abs() >= 1) {
        return Err(Error::WeightViolation);
    }
    if xi >= Rational64::zero() {
        return Err(Error::DomainViolation);
    }
    let binom = |n: i64, r: i64| -> Rational64 {
        let mut acc = Rational64::one();
        for t in 0..r {
            acc = acc * Rational64::from_integer(n - t) / Rational64::from_integer(t + 1);
        }
        acc
    };
    let mut sum = Rational64::zero();
    let mut pw = Rational64::one();
    for i in 0..k - m.abs() {
        sum += binom(k + m - 1, i) * binom(k - m - 1, i) * pw;
        pw *= -xi;
    }
    Ok(sum / (Rational64::one() - xi).pow((k - 1) as i32))
}

pub fn archimedean_orbital(k: i64, m: i64, xi: f64) -> Result<f64> {
    if !(k > m.abs() && m.abs() >= 1) {
        return Err(Error::WeightViolation);
    }
    if !(xi < 0.0) {
        return Err(Error::DomainViolation);
    }
    let binom = |n: i64, r: i64| (0..r).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64);
    let sum: f64 = (0..k - m.abs()).map(|i| binom(k + m - 1, i) * binom(k - m - 1, i) * (-xi).powi(i as i32)).sum();
    Ok(sum / (1.0 - xi).powi((k - 1) as i32))
}
