//! Exact character values as rationals modulo 1, the additive character
//! `ψ` of level zero, and multiplicative characters of quadratic fields
//! described by a wild element `α`, a tame exponent and a uniformizer value.

use crate::error::{Error, Result};
use crate::padic::{teichmuller, Padic};
use crate::quad::{Kind, QuadAlgebra, QuadElem};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

/// `e^{2πi t}` stored as the reduced rational `t ∈ [0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(Rational64);

impl Phase {
    pub fn new(t: Rational64) -> Phase {
        let f = t - t.floor();
        Phase(f)
    }

    pub fn frac(num: i64, den: i64) -> Phase {
        Phase::new(Rational64::new(num, den))
    }

    pub fn zero() -> Phase {
        Phase(Rational64::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> Rational64 {
        self.0
    }

    pub fn times(&self, k: i64) -> Phase {
        Phase::new(self.0 * Rational64::from_integer(k.rem_euclid(*self.0.denom())))
    }

    pub fn to_complex(&self) -> Complex64 {
        let t = *self.0.numer() as f64 / *self.0.denom() as f64;
        Complex64::from_polar(1.0, TAU * t)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, o: Phase) -> Phase {
        Phase::new(self.0 + o.0)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::new(-self.0)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, o: Phase) -> Phase {
        Phase::new(self.0 - o.0)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({})", self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `ψ(x)`: the fractional part of `x`.
pub fn psi(x: &Padic) -> Result<Phase> {
    let (n, d) = x.frac()?;
    Ok(Phase::frac(n as i64, d as i64))
}

/// `ψ_K(x) = ψ(Tr x)`.
pub fn psi_k(x: &QuadElem) -> Result<Phase> {
    psi(&x.trace())
}

/// Residue-field data shared by every character over one algebra: a fixed
/// generator of `k_K^×`, discrete logarithms and Teichmüller lifts.
#[derive(Debug)]
struct ResidueTable {
    qk: i64,
    ind: Vec<u32>,
    lift: Vec<QuadElem>,
    lift_inv: Vec<QuadElem>,
}

impl ResidueTable {
    fn build(alg: &QuadAlgebra) -> Result<ResidueTable> {
        let ctx = alg.ctx();
        let p = ctx.p();
        match alg.kind() {
            Kind::Inert => {
                let d = alg.d().residue();
                let qk = p * p;
                let mul = |x: (i64, i64), y: (i64, i64)| ((x.0 * y.0 + x.1 * y.1 % p * d) % p, (x.0 * y.1 + x.1 * y.0) % p);
                let mut gen = None;
                'outer: for a in 0..p {
                    for b in 1..p {
                        let mut x = (1, 0);
                        let mut ord = 0;
                        loop {
                            x = mul(x, (a, b));
                            ord += 1;
                            if x == (1, 0) {
                                break;
                            }
                        }
                        if ord == qk - 1 {
                            gen = Some((a, b));
                            break 'outer;
                        }
                    }
                }
                let g = gen.expect("F_{q^2} has a generator");
                let mut ind = vec![u32::MAX; (p * p) as usize];
                let mut x = (1, 0);
                for k in 0..qk - 1 {
                    ind[(x.0 * p + x.1) as usize] = k as u32;
                    x = mul(x, g);
                }
                let mut lift = vec![alg.zero(); (p * p) as usize];
                let mut lift_inv = lift.clone();
                for a in 0..p {
                    for b in 0..p {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let mut w = alg.ints(a, b);
                        for _ in 0..ctx.precision() {
                            w = w.pow(qk as u64);
                        }
                        lift[(a * p + b) as usize] = w;
                        lift_inv[(a * p + b) as usize] = w.pow(qk as u64 - 2);
                    }
                }
                Ok(ResidueTable { qk, ind, lift, lift_inv })
            }
            Kind::Ramified => {
                let g = ctx.generator();
                let mut ind = vec![u32::MAX; p as usize];
                let mut x = 1;
                for k in 0..p - 1 {
                    ind[x as usize] = k as u32;
                    x = x * g % p;
                }
                let mut lift = vec![alg.zero(); p as usize];
                let mut lift_inv = lift.clone();
                for a in 1..p {
                    let w = teichmuller(&ctx, a)?;
                    lift[a as usize] = alg.from_base(w);
                    lift_inv[a as usize] = alg.from_base(w.inv());
                }
                Ok(ResidueTable { qk: p, ind, lift, lift_inv })
            }
            Kind::Split => Err(Error::SplitKindUnsupported),
        }
    }

    fn code(&self, alg: &QuadAlgebra, w: &QuadElem) -> usize {
        let p = alg.ctx().p();
        match alg.kind() {
            Kind::Inert => (w.a.mod_pk(1).unwrap() as i64 * p + w.b.mod_pk(1).unwrap() as i64) as usize,
            _ => w.a.mod_pk(1).unwrap() as usize,
        }
    }
}

/// Decomposition `x = ϖ_K^m · ζ · (1 + u)` of a field element.
pub struct Decomposed {
    pub m: i32,
    pub ind: u32,
    pub one_plus_u: QuadElem,
}

/// A character of `K^×` for a quadratic field `K`:
/// `χ(ϖ_K^m ζ (1+u)) = m·unif + tame·ind(ζ)/(q_K − 1) + ψ_K(α log(1+u))`.
#[derive(Clone, Debug)]
pub struct MultChar {
    alg: QuadAlgebra,
    alpha: Option<QuadElem>,
    tame_exp: i64,
    unif_phase: Phase,
    table: Arc<ResidueTable>,
}

impl MultChar {
    pub fn new(alg: QuadAlgebra, alpha: Option<QuadElem>, tame_exp: i64, unif_phase: Phase) -> Result<MultChar> {
        let table = Arc::new(ResidueTable::build(&alg)?);
        let tame_exp = tame_exp.rem_euclid(table.qk - 1);
        Ok(MultChar { alg, alpha, tame_exp, unif_phase, table })
    }

    pub fn trivial(alg: QuadAlgebra) -> Result<MultChar> {
        MultChar::new(alg, None, 0, Phase::zero())
    }

    /// Same residue tables, new data.
    pub fn with(&self, alpha: Option<QuadElem>, tame_exp: i64, unif_phase: Phase) -> MultChar {
        MultChar {
            alg: self.alg,
            alpha,
            tame_exp: tame_exp.rem_euclid(self.table.qk - 1),
            unif_phase,
            table: self.table.clone(),
        }
    }

    pub fn alg(&self) -> QuadAlgebra {
        self.alg
    }

    pub fn alpha(&self) -> Option<QuadElem> {
        self.alpha
    }

    pub fn tame_exp(&self) -> i64 {
        self.tame_exp
    }

    pub fn unif_phase(&self) -> Phase {
        self.unif_phase
    }

    /// The wild element if it actually contributes, i.e. if `c(χ) ≥ 2`.
    fn effective_alpha(&self) -> Option<QuadElem> {
        self.alpha.filter(|a| !a.is_zero() && a.v() <= self.alg.c_psi() - 2)
    }

    /// The conductor derived from the data.
    pub fn conductor(&self) -> i32 {
        match self.effective_alpha() {
            Some(a) => self.alg.c_psi() - a.v(),
            None => {
                if self.tame_exp != 0 {
                    1
                } else {
                    0
                }
            }
        }
    }

    pub fn decompose(&self, x: &QuadElem) -> Result<Decomposed> {
        if x.norm().is_zero() {
            return Err(Error::NonInvertible);
        }
        let m = x.v();
        let w = *x * self.alg.pi_pow(-m);
        let code = self.table.code(&self.alg, &w);
        let ind = self.table.ind[code];
        debug_assert!(ind != u32::MAX);
        Ok(Decomposed { m, ind, one_plus_u: w * self.table.lift_inv[code] })
    }

    pub fn eval(&self, x: &QuadElem) -> Result<Phase> {
        let d = self.decompose(x)?;
        let mut ph = self.unif_phase.times(d.m as i64) + Phase::frac(self.tame_exp * d.ind as i64, self.table.qk - 1);
        if let Some(a) = self.effective_alpha() {
            ph = ph + psi_k(&(a * d.one_plus_u.log()?))?;
        }
        Ok(ph)
    }

    /// Value on `1 + u` using only the wild formula.
    pub fn eval_wild(&self, one_plus_u: &QuadElem) -> Result<Phase> {
        match self.effective_alpha() {
            Some(a) => psi_k(&(a * one_plus_u.log()?)),
            None => Ok(Phase::zero()),
        }
    }

    /// Teichmüller lift of the residue generator `g` raised to `k`.
    pub fn teich_power(&self, k: i64) -> QuadElem {
        let qk = self.table.qk;
        let k = k.rem_euclid(qk - 1) as u32;
        let code = self.table.ind.iter().position(|&i| i == k).unwrap();
        self.table.lift[code]
    }

    /// Conductor by scanning generators of each filtration step.
    pub fn conductor_scan(&self) -> Result<i32> {
        let ctx = self.alg.ctx();
        let top = ctx.precision() as i32 - 3;
        let basis: Vec<QuadElem> = match self.alg.kind() {
            Kind::Inert => vec![self.alg.one(), self.alg.sqrt_d()],
            _ => vec![self.alg.one()],
        };
        for k in (1..=top).rev() {
            let pk = self.alg.pi_pow(k);
            for b in &basis {
                for r in 1..ctx.p() {
                    let g = self.alg.one() + (*b * pk).scale(ctx.int(r));
                    if !self.eval(&g)?.is_zero() {
                        return Ok(k + 1);
                    }
                }
            }
        }
        for t in 0..self.table.qk - 1 {
            if !self.eval(&self.teich_power(t))?.is_zero() {
                return Ok(1);
            }
        }
        Ok(0)
    }

    /// `θ` is minimal iff `α_θ` is a minimal element.
    pub fn is_minimal(&self) -> Result<bool> {
        if self.conductor() < 2 {
            return Err(Error::ConductorTooSmall);
        }
        self.effective_alpha().unwrap().is_minimal_element()
    }

    /// `χ̄(x) = χ(x̄)`.
    pub fn conjugate(&self) -> MultChar {
        let p = self.alg.ctx().p();
        let (tame, unif) = match self.alg.kind() {
            Kind::Inert => (self.tame_exp * p, self.unif_phase),
            _ => (self.tame_exp, self.unif_phase + self.central_sign_of_minus_one()),
        };
        self.with(self.alpha.map(|a| a.conj()), tame, unif)
    }

    // On a ramified field `ϖ̄_K = −ϖ_K`, so `χ̄(ϖ_K) = χ(−1)χ(ϖ_K)`.
    fn central_sign_of_minus_one(&self) -> Phase {
        let q = self.table.qk;
        Phase::frac(self.tame_exp * ((q - 1) / 2), q - 1)
    }

    pub fn inverse(&self) -> MultChar {
        self.with(self.alpha.map(|a| -a), -self.tame_exp, -self.unif_phase)
    }

    pub fn mul(&self, o: &MultChar) -> MultChar {
        let alpha = match (self.alpha, o.alpha) {
            (Some(a), Some(b)) => Some(a + b),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        };
        self.with(alpha, self.tame_exp + o.tame_exp, self.unif_phase + o.unif_phase)
    }

    /// Restriction to `F^×` evaluated on the generators `p`, `ω(g_F)`, `1 + p`.
    pub fn central_values(&self) -> Result<[Phase; 3]> {
        let ctx = self.alg.ctx();
        let g = teichmuller(&ctx, ctx.generator())?;
        Ok([
            self.eval(&self.alg.from_base(ctx.pi_pow(1)))?,
            self.eval(&self.alg.from_base(g))?,
            self.eval(&self.alg.from_base(ctx.int(1 + ctx.p())))?,
        ])
    }

    pub fn same_central(&self, o: &MultChar) -> Result<bool> {
        Ok(self.central_values()? == o.central_values()?)
    }
}

/// Wild element used for a character of conductor at most one:
/// `α_χ = ϖ_K^{−c + c(ψ_K)}`.
pub fn small_conductor_alpha(alg: &QuadAlgebra, c: i32) -> QuadElem {
    alg.pi_pow(-c + alg.c_psi())
}

/// Phases summed as complex numbers, with a flag for the all-zero case.
pub fn phase_sum<I: IntoIterator<Item = (Phase, f64)>>(it: I) -> (Complex64, bool) {
    let mut acc = Complex64::zero();
    let mut all_zero = true;
    for (ph, w) in it {
        all_zero &= ph.is_zero();
        acc += ph.to_complex() * w;
    }
    (acc, all_zero)
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
