//! Cuspidal data `(L, θ, B)` for minimal supercuspidals, the simple character
//! `θ̃`, matrix coefficients of type-1 minimal vectors, and finite checks of
//! the intertwining, orbit and formal-degree identities.

use crate::error::{Error, Result};
use crate::padic::{Ctx, INF};
use crate::phase::{psi, MultChar, Phase};
use crate::quad::{Kind, QuadAlgebra, QuadElem};
use crate::quaternion::{Mat2, QuatAlgebra, QuatElem, Side};
use crate::registry::Polarization;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

/// The datum `(L, θ, B)` and everything derived from it.
///
/// Levels are kept doubled (`i2 = 2i`, `i2p = 2i′`) in units of `v_L`, so
/// that `ν(j) = ε_{B,L}/2` stays integral.
#[derive(Clone, Debug)]
pub struct CuspidalDatum {
    b: QuatAlgebra,
    theta: MultChar,
    theta_b: MultChar,
    alpha: QuadElem,
    c_theta: i32,
    i2: i32,
    i2p: i32,
    case: u8,
    c_pi: i32,
    dim_lambda: i64,
    y0: QuadElem,
    polarization: &'static str,
}

/// Value of a type-1 matrix coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Zero,
    Value(Phase),
    /// Inside `J` but outside `ZJ¹` when `dim Λ = q`: needs the full `Λ`.
    Unresolved,
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Zero)
    }
}

/// `g = z · l · (1 + t)` with `z ∈ F^×`, `l ∈ U_L(1)`, `t ∈ L^⊥`.
#[derive(Clone, Copy, Debug)]
pub struct Zb1Factor {
    pub z: crate::padic::Padic,
    pub l: QuadElem,
    pub t: QuatElem,
}

#[derive(Clone, Copy, Debug)]
pub struct IntertwineOutcome {
    pub intertwines: bool,
    pub in_j: bool,
    pub witness: Option<QuatElem>,
    pub tested: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DatumSummary {
    pub case: u8,
    pub side: Side,
    pub l_kind: Kind,
    pub c_theta: i32,
    pub c_pi: i32,
    pub i: String,
    pub i_prime: String,
    pub dim_lambda: i64,
    pub polarization: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormalDegree {
    pub cells: u64,
    pub group_order: u64,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub measured: Rational64,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub predicted: Rational64,
}

pub fn build_datum(theta: &MultChar, side: Side, pol: &dyn Polarization) -> Result<CuspidalDatum> {
    let l = theta.alg();
    let c_theta = theta.conductor();
    if c_theta < 2 {
        return Err(Error::ConductorTooSmall);
    }
    if !theta.is_minimal()? {
        return Err(Error::NotMinimal);
    }
    let b = QuatAlgebra::on_side(l, side)?;
    let eps = b.eps_bl();
    let i2 = 2 * (c_theta - eps).div_euclid(2) + eps;
    let i2p = 2 * (c_theta - eps + 1).div_euclid(2) + eps;
    let alpha = theta.alpha().unwrap();
    let c_pi = -alpha.imaginary_part().norm().v();
    let need = c_pi as u32 + 4;
    if l.ctx().precision() < need {
        return Err(Error::PrecisionTooLow { have: l.ctx().precision(), need });
    }
    let case = match (side, l.kind(), c_theta % 2) {
        (Side::Matrix, Kind::Inert, 0) => 1,
        (Side::Matrix, Kind::Inert, _) => 2,
        (Side::Matrix, Kind::Ramified, _) => 3,
        (Side::Division, Kind::Inert, 0) => 4,
        (Side::Division, Kind::Inert, _) => 5,
        (Side::Division, Kind::Ramified, _) => 6,
        (_, Kind::Split, _) => return Err(Error::SplitKindUnsupported),
    };
    let theta_b = if case == 6 {
        theta.with(theta.alpha(), theta.tame_exp(), theta.unif_phase() + Phase::frac(1, 2))
    } else {
        theta.clone()
    };
    Ok(CuspidalDatum {
        b,
        theta: theta.clone(),
        theta_b,
        alpha,
        c_theta,
        i2,
        i2p,
        case,
        c_pi,
        dim_lambda: if i2p != i2 { l.ctx().q() } else { 1 },
        y0: pol.direction(&l),
        polarization: pol.name(),
    })
}

impl CuspidalDatum {
    pub fn l(&self) -> QuadAlgebra {
        self.b.l()
    }

    pub fn b(&self) -> QuatAlgebra {
        self.b
    }

    pub fn ctx(&self) -> Ctx {
        self.b.ctx()
    }

    pub fn theta(&self) -> &MultChar {
        &self.theta
    }

    /// `θ` twisted on `ϖ_L` by the sign `−1` in the division-ramified case.
    pub fn theta_b(&self) -> &MultChar {
        &self.theta_b
    }

    pub fn alpha(&self) -> QuadElem {
        self.alpha
    }

    pub fn alpha_quat(&self) -> QuatElem {
        self.b.from_l(self.alpha)
    }

    pub fn c_theta(&self) -> i32 {
        self.c_theta
    }

    pub fn i2(&self) -> i32 {
        self.i2
    }

    pub fn i2p(&self) -> i32 {
        self.i2p
    }

    pub fn case_index(&self) -> u8 {
        self.case
    }

    pub fn c_pi(&self) -> i32 {
        self.c_pi
    }

    /// The parameter `n` of the case table.
    pub fn n(&self) -> i32 {
        self.c_theta / 2
    }

    pub fn dim_lambda(&self) -> i64 {
        self.dim_lambda
    }

    pub fn side(&self) -> Side {
        self.b.side()
    }

    pub fn polarization(&self) -> &'static str {
        self.polarization
    }

    pub fn summary(&self) -> DatumSummary {
        DatumSummary {
            case: self.case,
            side: self.side(),
            l_kind: self.l().kind(),
            c_theta: self.c_theta,
            c_pi: self.c_pi,
            i: half(self.i2),
            i_prime: half(self.i2p),
            dim_lambda: self.dim_lambda,
            polarization: self.polarization,
        }
    }

    /// `2ν(w j)`.
    fn nu2_perp(&self, w: &QuadElem) -> i32 {
        if w.is_zero() {
            INF
        } else {
            2 * w.v() + self.b.v_gamma()
        }
    }

    /// `g = x (1 + w j)`, or `None` when the `L`-part vanishes.
    fn split(&self, g: &QuatElem) -> Option<(QuadElem, QuadElem)> {
        if g.x.norm().is_zero() {
            return None;
        }
        Some((g.x, g.x.inv() * g.y))
    }

    fn in_f_u1(x: &QuadElem) -> bool {
        match x.alg().kind() {
            Kind::Ramified => x.b.v() >= x.a.v(),
            _ => x.b.v() > x.a.v(),
        }
    }

    fn in_u1(x: &QuadElem) -> bool {
        (*x - x.alg().one()).v() >= 1
    }

    /// Whether `w j` lies on the polarization line at level `i` or deeper.
    fn on_line(&self, w: &QuadElem) -> bool {
        let n2 = self.nu2_perp(w);
        if n2 >= self.i2p {
            return true;
        }
        if n2 < self.i2 || self.dim_lambda == 1 {
            return false;
        }
        let z = *w * self.y0.inv();
        z.b.v() > z.a.v()
    }

    /// `g ∈ J = L^× J¹`.
    pub fn in_j(&self, g: &QuatElem) -> bool {
        match self.split(g) {
            Some((_, w)) => self.nu2_perp(&w) >= self.i2,
            None => false,
        }
    }

    pub fn zb1_membership(&self, g: &QuatElem) -> Option<Zb1Factor> {
        let (x, w) = self.split(g)?;
        if !Self::in_f_u1(&x) || !self.on_line(&w) {
            return None;
        }
        let z = x.a;
        let l = x.scale(z.inv());
        let t = self.b.elem(self.l().zero(), w);
        Some(Zb1Factor { z, l, t })
    }

    /// `θ̃(l(1 + t)) = θ(l)·ψ(Tr(α_θ t))`.
    pub fn simple_char_eval(&self, l: &QuadElem, t: &QuatElem) -> Result<Phase> {
        if l.norm().is_zero() {
            return Err(Error::OutsideDomain);
        }
        let (tl, tp) = t.orthogonal_decompose();
        let deep = t.nu2() >= self.i2p;
        let on_b1 = self.dim_lambda > 1
            && self.on_line(&tp.y)
            && (tl.nu2() >= self.i2p || (tl.x.is_imaginary() && tl.nu2() >= self.i2));
        if !deep && !on_b1 {
            return Err(Error::OutsideDomain);
        }
        let wild = psi(&(self.alpha_quat() * *t).trace())?;
        Ok(self.theta_b.eval(l)? + wild)
    }

    /// Matrix coefficient of the type-1 minimal vector, normalised by `Φ(1) = 1`.
    pub fn matrix_coefficient(&self, g: &QuatElem) -> Result<Coefficient> {
        let Some((x, w)) = self.split(g) else {
            return Ok(Coefficient::Zero);
        };
        let n2 = self.nu2_perp(&w);
        if n2 < self.i2 {
            return Ok(Coefficient::Zero);
        }
        if self.dim_lambda == 1 {
            return Ok(Coefficient::Value(self.theta_b.eval(&x)?));
        }
        if !Self::in_f_u1(&x) {
            return Ok(Coefficient::Unresolved);
        }
        if self.on_line(&w) {
            Ok(Coefficient::Value(self.theta.eval(&x)?))
        } else {
            Ok(Coefficient::Zero)
        }
    }

    /// `θ̃(h)` for `h ∈ H¹ = U_L(1) K_A(i′)`.
    fn h1_value(&self, h: &QuatElem) -> Result<Option<Phase>> {
        match self.split(h) {
            Some((x, w)) if Self::in_u1(&x) && self.nu2_perp(&w) >= self.i2p => Ok(Some(self.theta.eval(&x)?)),
            _ => Ok(None),
        }
    }

    /// Scans `h = 1 + p^k r e` over the basis `{1, √D, j, √D j}` and compares
    /// `θ̃(g⁻¹hg)` with `θ̃(h)` whenever both sides lie in `H¹`.
    pub fn intertwine_check(&self, g: &QuatElem) -> Result<IntertwineOutcome> {
        let gi = g.checked_inv()?;
        let l = self.l();
        let c = self.ctx();
        let basis = [
            self.b.from_l(l.one()),
            self.b.from_l(l.sqrt_d()),
            self.b.elem(l.zero(), l.one()),
            self.b.elem(l.zero(), l.sqrt_d()),
        ];
        let one = self.b.one();
        let mut tested = 0;
        let mut witness = None;
        'scan: for k in 0..=self.c_theta + 2 {
            for e in &basis {
                for r in 1..c.p() {
                    let h = one + e.scale(c.int(r) * c.pi_pow(k));
                    let Some(a) = self.h1_value(&h)? else { continue };
                    let Some(b) = self.h1_value(&(gi * h * *g))? else { continue };
                    tested += 1;
                    if a != b {
                        witness = Some(h);
                        break 'scan;
                    }
                }
            }
        }
        Ok(IntertwineOutcome { intertwines: witness.is_none(), in_j: self.in_j(g), witness, tested })
    }

    /// `ϖ_L^{m0} O_L / ϖ_L^{m1} O_L`, enumerated by digits.
    fn digit_lattice(&self, m0: i32, m1: i32) -> Vec<QuadElem> {
        let l = self.l();
        let p = self.ctx().p();
        let digits: Vec<QuadElem> = match l.kind() {
            Kind::Inert => (0..p).flat_map(|a| (0..p).map(move |b| (a, b))).map(|(a, b)| l.ints(a, b)).collect(),
            _ => (0..p).map(|a| l.ints(a, 0)).collect(),
        };
        let mut out = vec![l.zero()];
        for k in m0..m1 {
            let pk = l.pi_pow(k);
            out = out.iter().flat_map(|y| digits.iter().map(move |d| *y + *d * pk)).collect();
        }
        out
    }

    /// Smallest `v_L(y)` with `2ν(y j) ≥ n2`.
    fn perp_start(&self, n2: i32) -> i32 {
        (n2 - self.b.v_gamma() + 1).div_euclid(2)
    }

    /// `ψ(Tr(g⁻¹α g x))` averaged over `1 + t`, `t ∈ L^⊥`, with total weight `total`.
    fn orbit_sum(&self, x: &QuatElem, perps: &[QuadElem], total: f64) -> Result<Complex64> {
        let a = self.alpha_quat();
        let w = total / perps.len() as f64;
        let mut acc = Complex64::zero();
        for y in perps {
            let g = self.b.one() + self.b.elem(self.l().zero(), *y);
            let gi = g.checked_inv()?;
            let ph = psi(&(gi * a * g * *x).trace())?;
            acc += ph.to_complex() * w;
        }
        Ok(acc)
    }

    /// Orbit side of the character formula: `∫_{G_α\J} e^{⟨g⁻¹α_θ g, x⟩} dg`
    /// with `Vol(G_α\J) = dim Λ`, on representatives modulo `B^depth`.
    pub fn orbit_trace(&self, x: &QuatElem, depth: i32) -> Result<Complex64> {
        let m0 = self.perp_start(self.i2);
        let run = |k: i32| -> Result<Complex64> {
            let m1 = self.perp_start(2 * k).max(m0);
            self.orbit_sum(x, &self.digit_lattice(m0, m1), self.dim_lambda as f64)
        };
        let a = run(depth)?;
        let b = run(depth + 1)?;
        if (a - b).norm() > 1e-9 {
            return Err(Error::DepthInsufficient);
        }
        Ok(b)
    }

    /// The same orbit sum restricted to `U_L(1)\B¹` with total weight one.
    pub fn b1_orbit_sum(&self, x: &QuatElem, depth: i32) -> Result<Complex64> {
        let run = |k: i32| -> Result<Complex64> {
            let m_line = self.perp_start(self.i2);
            let m_deep = self.perp_start(self.i2p);
            let m1 = self.perp_start(2 * k).max(m_deep);
            let deep = self.digit_lattice(m_deep, m1);
            let reps: Vec<QuadElem> = if self.dim_lambda == 1 {
                deep
            } else {
                let c = self.ctx();
                let lead = self.l().pi_pow(m_line) * self.y0;
                (0..c.p())
                    .flat_map(|r| deep.iter().map(move |d| *d + lead.scale(c.int(r))))
                    .collect()
            };
            self.orbit_sum(x, &reps, 1.0)
        };
        let a = run(depth)?;
        let b = run(depth + 1)?;
        if (a - b).norm() > 1e-9 {
            return Err(Error::DepthInsufficient);
        }
        Ok(b)
    }

    /// `x ∈ log B¹`: `v_L(x_L) ≥ 1` and `x^⊥` on the polarization line or deeper.
    pub fn in_b1_lattice(&self, x: &QuatElem) -> bool {
        let (xl, xp) = x.orthogonal_decompose();
        (xl.x.is_zero() || xl.x.v() >= 1) && self.on_line(&xp.y)
    }

    /// `x ∈ j₀`: `v_L(x_L) > 0` and `ν(x^⊥) ≥ i`.
    pub fn in_j0(&self, x: &QuatElem) -> bool {
        let (xl, xp) = x.orthogonal_decompose();
        (xl.x.is_zero() || xl.x.v() >= 1) && self.nu2_perp(&xp.y) >= self.i2
    }

    /// `e^{⟨α_θ, x⟩}`.
    pub fn pairing_phase(&self, x: &QuatElem) -> Result<Phase> {
        psi(&(self.alpha_quat() * *x).trace())
    }

    /// `∑ |Φ|²` over `Z\G` by enumerating `GL₂(Z/p^N)` (and `ϖ_L·GL₂` when
    /// `L` is ramified), with `Vol(Z\ZK) = 1`.
    pub fn formal_degree(&self) -> Result<FormalDegree> {
        if !matches!(self.case, 1 | 3) {
            return Err(Error::NotApplicable("formal degree is enumerated for cases 1 and 3 only"));
        }
        let c = self.ctx();
        let p = c.p() as u64;
        let depth = self.c_theta as u32;
        let pn = p.pow(depth);
        if pn.pow(4) > 2_000_000 {
            return Err(Error::NotApplicable("enumeration too large"));
        }
        let cosets: Vec<QuatElem> = match self.l().kind() {
            Kind::Ramified => vec![self.b.one(), self.b.from_l(self.l().sqrt_d())],
            _ => vec![self.b.one()],
        };
        let ints: Vec<_> = (0..pn).map(|k| c.int(k as i64)).collect();
        let mut cells = 0u64;
        let mut order = 0u64;
        for a in 0..pn {
            for bb in 0..pn {
                for cc in 0..pn {
                    for d in 0..pn {
                        if (a * d % p + p - bb * cc % p) % p == 0 {
                            continue;
                        }
                        order += 1;
                        let m = Mat2::new(ints[a as usize], ints[bb as usize], ints[cc as usize], ints[d as usize]);
                        let k = self.b.from_matrix(&m)?;
                        for s in &cosets {
                            if !self.matrix_coefficient(&(*s * k))?.is_zero() {
                                cells += 1;
                            }
                        }
                    }
                }
            }
        }
        let measured = Rational64::new(cells as i64, order as i64);
        Ok(FormalDegree { cells, group_order: order, measured, predicted: self.formal_degree_closed_form() })
    }

    /// `1/((1 − q⁻¹) q^{2n})` for case 1 and `2/((1 − q⁻²) q^{n+1})` for case 3.
    pub fn formal_degree_closed_form(&self) -> Rational64 {
        let q = self.ctx().q();
        let n = self.n() as u32;
        match self.case {
            1 => Rational64::new(q, (q - 1) * q.pow(2 * n)),
            3 => Rational64::new(2 * q * q, (q * q - 1) * q.pow(n + 1)),
            _ => Rational64::zero(),
        }
    }
}

fn half(n2: i32) -> String {
    if n2 % 2 == 0 {
        format!("{}", n2 / 2)
    } else {
        format!("{n2}/2")
    }
}
