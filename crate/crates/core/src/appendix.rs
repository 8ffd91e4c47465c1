//! The 2×2 model of the matrix side: `L` embedded through `√D′ ↦ [[0,1],[D′,0]]`
//! with `D′ = 1/(α_θ² ϖ_L^{2c(θ)})`, test vectors `k = [[1,u],[0,1]]·diag(v,1)`
//! found by a quadratic congruence in `v`, and a Kirillov-model spot check.

use crate::cuspidal::{Coefficient, CuspidalDatum};
use crate::error::{Error, Result};
use crate::padic::{Padic, INF};
use crate::phase::psi;
use crate::quad::{Kind, QuadAlgebra, QuadElem};
use crate::quaternion::{Mat2, Side};
use crate::registry::Named;
use crate::report::ser_rational;
use crate::waldspurger::{start_depth, stable_torus_sum, IntegralReport, PeriodProblem, PeriodRoute};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

/// Coordinates of the 2×2 model relative to the pair model.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    /// `P = diag(w, 1)` carries 2×2-model matrices to pair-model matrices.
    pub w: Padic,
    pub d_prime: Padic,
    /// `ϖ^{c(θ)/e_L}` with `ϖ = p` (inert) or `ϖ = D_L` (ramified).
    pub varpi_c: Padic,
    pub c_over_e: i32,
    /// Levels of the real and line coordinates of `L^⊥` inside `B¹`.
    pub i_a: i32,
    pub j_a: i32,
    pub base: i32,
}

impl Frame {
    pub fn new(d: &CuspidalDatum) -> Result<Frame> {
        if d.side() != Side::Matrix {
            return Err(Error::NotApplicable("the 2x2 model needs the matrix side"));
        }
        if d.polarization() != "appendix" {
            return Err(Error::NotApplicable("the 2x2 model needs the appendix polarization"));
        }
        let l = d.l();
        let c = d.c_theta();
        let (varpi, c_over_e) = match l.kind() {
            Kind::Inert => (l.ctx().pi_pow(1), c),
            _ => (l.d(), c / 2),
        };
        let varpi_c = varpi.powi(c_over_e as i64);
        let w = (d.alpha().b * l.d() * varpi_c).inv();
        let n = d.n();
        let (i_a, j_a, base) = match d.case_index() {
            1 => (n, n, 1),
            2 => (n + 1, n, 1),
            _ => ((n + 1) / 2, n / 2, 0),
        };
        Ok(Frame { w, d_prime: w * w * l.d(), varpi_c, c_over_e, i_a, j_a, base })
    }

    /// `Φ₀(A) = Φ(P A P⁻¹)`.
    pub fn coefficient(&self, d: &CuspidalDatum, a: &Mat2) -> Result<Coefficient> {
        let [[a11, a12], [a21, a22]] = a.0;
        let m = Mat2::new(a11, self.w * a12, a21 / self.w, a22);
        d.matrix_coefficient(&d.b().from_matrix(&m)?)
    }
}

/// `k⁻¹ t k` for `t = a + b√D_E ↦ [[a, b], [bD_E, a]]` and `k = [[v, u], [0, 1]]`.
pub fn conjugated_torus(t: &QuadElem, u: &Padic, v: &Padic) -> Mat2 {
    let de = t.alg().d();
    let (a, b) = (t.a, t.b);
    let one = a.ctx().one();
    Mat2::new(a - b * de * *u, b * (one - de * *u * *u) / *v, b * de * *v, a + b * de * *u)
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub u: String,
    pub v: String,
    pub conjugate: bool,
    pub beta_min: u32,
    #[serde(serialize_with = "ser_rational")]
    pub predicted: Rational64,
    pub verified: Option<bool>,
    pub brute: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub case: u8,
    pub candidates: usize,
    pub solutions: Vec<Solution>,
    pub verified: usize,
    pub all_verified: bool,
}

/// Most solutions re-verified by brute force per search; beyond this an even sample is taken.
pub const VERIFY_CAP: usize = 48;

fn val(x: &Padic) -> i32 {
    if x.is_zero() {
        INF
    } else {
        x.v()
    }
}

/// Minimal `v(b)` for which `k⁻¹(1 + b√D_E)k` lies in `ZB¹`.
fn support_level(f: &Frame, e: &QuadAlgebra, u: &Padic, v: &Padic) -> i32 {
    let de = e.d();
    let one = de.ctx().one();
    let y1 = de * *u;
    let y2 = (one - de * *u * *u - de / f.d_prime * *v * *v) / (*v * de.ctx().int(2));
    let t1 = if val(&y1) >= INF / 2 { i32::MIN } else { f.i_a - y1.v() };
    let t2 = if val(&y2) >= INF / 2 { i32::MIN } else { f.j_a - y2.v() };
    t1.max(t2).max(f.base)
}

/// `(D_E/D′)v² − 2ϖ^{c/e} b_χ D_E v + (1 − D_E u²)`.
fn quadratic(f: &Frame, e: &QuadAlgebra, b_chi: &Padic, u: &Padic, v: &Padic) -> Padic {
    let de = e.d();
    let c = de.ctx();
    de / f.d_prime * *v * *v - c.int(2) * f.varpi_c * *b_chi * de * *v + (c.one() - de * *u * *u)
}

fn check_scope(pb: &PeriodProblem) -> Result<Frame> {
    let d = pb.datum();
    let e = pb.e();
    if !e.is_field() {
        return Err(Error::NotApplicable("the quadratic criterion needs E a field"));
    }
    if e.e() != d.l().e() {
        return Err(Error::NotApplicable("the quadratic criterion needs e_E = e_L"));
    }
    if d.theta().central_values()?.iter().any(|p| !p.is_zero()) {
        return Err(Error::NotApplicable("the quadratic criterion needs trivial central character"));
    }
    if pb.chi().conductor_pi() > d.c_pi() {
        return Err(Error::NotApplicable("the quadratic criterion needs c(pi) >= c(pi_chi)"));
    }
    if !pb.star_regime() {
        return Err(Error::StarViolated);
    }
    Frame::new(d)
}

struct Candidate {
    u: Padic,
    v: Padic,
    conjugate: bool,
    beta: u32,
}

fn candidates(pb: &PeriodProblem, f: &Frame) -> (usize, Vec<Candidate>) {
    let e = pb.e();
    let c = e.ctx();
    let p = c.p();
    let k = f.c_over_e.max(1) as u32;
    let pk = c.ppow(k) as i64;
    let mut us = vec![c.zero()];
    for s in 0..=k as i32 {
        for r in 1..p {
            us.push(c.int(r) * c.pi_pow(s));
        }
    }
    let mut tried = 0;
    let mut out = Vec::new();
    for conjugate in [false, true] {
        let chi = if conjugate { pb.chi().conjugate() } else { pb.chi().clone() };
        let b_chi = chi.alpha_imag().b;
        for u in &us {
            for vi in 1..pk {
                if vi % p == 0 {
                    continue;
                }
                tried += 1;
                let v = c.int(vi);
                let beta = support_level(f, &e, u, &v);
                let q = quadratic(f, &e, &b_chi, u, &v);
                if val(&q) >= f.c_over_e - beta {
                    out.push(Candidate { u: *u, v, conjugate, beta: beta.max(0) as u32 });
                }
            }
        }
    }
    (tried, out)
}

fn verify(pb: &PeriodProblem, f: &Frame, cand: &Candidate) -> Result<(IntegralReport, crate::waldspurger::TorusSum)> {
    let d = pb.datum();
    let e = pb.e();
    let chi = if cand.conjugate { pb.chi().conjugate() } else { pb.chi().clone() };
    let phi = |t: &QuadElem| f.coefficient(d, &conjugated_torus(t, &cand.u, &cand.v));
    let (s, depth) = stable_torus_sum(&e, &chi, start_depth(pb), phi)?;
    let pred = vec![e.filtration_volume(cand.beta)];
    let rep = IntegralReport::from_sum("appendix-2x2", pb, None, pred, s.clone(), depth);
    Ok((rep, s))
}

/// Searches `(u, v)` for both orientations `χ`, `χ̄` and re-verifies solutions
/// by brute force in the 2×2 model.
pub fn appendix_test_vector_search(pb: &PeriodProblem) -> Result<SearchReport> {
    let f = check_scope(pb)?;
    let (tried, cands) = candidates(pb, &f);
    let stride = cands.len().div_ceil(VERIFY_CAP).max(1);
    let mut sols = Vec::new();
    let mut verified = 0;
    let mut all_ok = true;
    for (i, cand) in cands.iter().enumerate() {
        let predicted = pb.e().filtration_volume(cand.beta);
        let (ok, brute) = if i % stride == 0 {
            let (rep, s) = verify(pb, &f, cand)?;
            verified += 1;
            all_ok &= rep.matches && rep.is_nonzero();
            (Some(rep.matches && rep.is_nonzero()), Some([s.value.re, s.value.im]))
        } else {
            (None, None)
        };
        sols.push(Solution {
            u: format!("{}", cand.u),
            v: format!("{}", cand.v),
            conjugate: cand.conjugate,
            beta_min: cand.beta,
            predicted,
            verified: ok,
            brute,
        });
    }
    Ok(SearchReport { case: pb.datum().case_index(), candidates: tried, solutions: sols, verified, all_verified: all_ok })
}

/// Period integral through the first verified `(u, v)`, or through `k = 1`
/// when no solution exists.
pub struct AppendixTwoByTwo;

impl Named for AppendixTwoByTwo {
    fn name(&self) -> &'static str {
        "appendix-2x2"
    }
}

impl PeriodRoute for AppendixTwoByTwo {
    fn integral(&self, pb: &PeriodProblem) -> Result<IntegralReport> {
        let f = check_scope(pb)?;
        let (_, cands) = candidates(pb, &f);
        if let Some(c) = cands.first() {
            return Ok(verify(pb, &f, c)?.0);
        }
        let d = pb.datum();
        let c = pb.e().ctx();
        let phi = |t: &QuadElem| f.coefficient(d, &conjugated_torus(t, &c.zero(), &c.one()));
        let (s, depth) = stable_torus_sum(&pb.e(), pb.chi(), start_depth(pb), phi)?;
        Ok(IntegralReport::from_sum(self.name(), pb, None, vec![Rational64::zero()], s, depth))
    }
}

/// Values of `W(diag(a,1))` on one valuation class of `a`.
#[derive(Clone, Debug, Serialize)]
pub struct WhittakerRow {
    pub v: i32,
    pub unit: i64,
    pub modulus: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WhittakerReport {
    pub case: u8,
    pub rows: Vec<WhittakerRow>,
    pub support_valuation: Option<i32>,
    /// Largest `k` with every supported unit `≡ 1 mod p^k`.
    pub support_unit_level: Option<i32>,
    pub modulus_spread: f64,
    pub off_support_max: f64,
}

const ZERO_TOL: f64 = 1e-9;

/// `∑_{x ∈ p^{−r}O/p^s} p^{−s} Φ₀([[ϖ^m a, ϖ^m x], [0, 1]]) ψ(−x)` with `m = ⌊c(π)/2⌋`.
fn whittaker_value(d: &CuspidalDatum, f: &Frame, a: &Padic, r: i32, s: i32) -> Result<Complex64> {
    let c = d.ctx();
    let pm = c.pi_pow(d.c_pi() / 2);
    let cells = c.ppow((r + s) as u32) as i64;
    let weight = (c.p() as f64).powi(-s);
    let mut acc = Complex64::zero();
    for k in 0..cells {
        let x = c.int(k) * c.pi_pow(-r);
        let m = Mat2::new(pm * *a, pm * x, c.zero(), c.one());
        match f.coefficient(d, &m)? {
            Coefficient::Value(ph) => acc += (ph - psi(&x)?).to_complex() * weight,
            Coefficient::Zero => {}
            Coefficient::Unresolved => return Err(Error::NotApplicable("Whittaker check needs dim Λ = 1")),
        }
    }
    Ok(acc)
}

/// Samples `a = p^k u` over `k ∈ [−c(π), 1]` and units `u mod p²`, comparing two
/// integration ranges to certify the Riemann sums.
pub fn whittaker_check(d: &CuspidalDatum) -> Result<WhittakerReport> {
    if !matches!(d.case_index(), 1 | 3) {
        return Err(Error::NotApplicable("Whittaker check covers cases 1 and 3"));
    }
    let f = Frame::new(d)?;
    let c = d.ctx();
    let p = c.p();
    let (r, s) = (d.c_pi() / 2 + 1, 1);
    let mut rows = Vec::new();
    let mut off = 0.0f64;
    for k in -d.c_pi()..=1 {
        for unit in 1..p * p {
            if unit % p == 0 {
                continue;
            }
            let a = c.int(unit) * c.pi_pow(k);
            let w0 = whittaker_value(d, &f, &a, r, s)?;
            let w1 = whittaker_value(d, &f, &a, r + 1, s + 1)?;
            if (w0 - w1).norm() > ZERO_TOL {
                return Err(Error::DepthUnstable);
            }
            if w1.norm() > ZERO_TOL {
                rows.push(WhittakerRow { v: k, unit, modulus: w1.norm() });
            } else {
                off = off.max(w1.norm());
            }
        }
    }
    let vals: Vec<i32> = rows.iter().map(|r| r.v).collect();
    let support_valuation = match vals.first() {
        Some(v0) if vals.iter().all(|v| v == v0) => Some(*v0),
        _ => None,
    };
    let support_unit_level = if rows.is_empty() {
        None
    } else {
        let lvl = |u: i64| if (u - 1) % (p * p) == 0 { 2 } else if (u - 1) % p == 0 { 1 } else { 0 };
        rows.iter().map(|r| lvl(r.unit)).min()
    };
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.modulus), hi.max(r.modulus)));
    Ok(WhittakerReport {
        case: d.case_index(),
        rows,
        support_valuation,
        support_unit_level,
        modulus_spread: if hi > 0.0 { (hi - lo) / hi } else { 0.0 },
        off_support_max: off,
    })
}
