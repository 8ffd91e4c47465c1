//! Quadratic étale algebras `F(√D)` over the p-adic rationals.
//!
//! The split algebra is realised as `F[x]/(x² − 1)`, which is isomorphic to
//! `F × F` through `a + b√1 ↦ (a + b, a − b)`; the pair view is exposed by
//! [`QuadElem::to_pair`] and [`QuadAlgebra::from_pair`].

use crate::error::{Error, Result};
use crate::padic::{Ctx, Padic, INF};
use num_rational::Rational64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadAlgebra {
    kind: Kind,
    d: Padic,
}

impl PartialEq for QuadAlgebra {
    fn eq(&self, o: &QuadAlgebra) -> bool {
        self.kind == o.kind && self.d == o.d
    }
}

impl QuadAlgebra {
    /// Checks that `d` has the square class of `kind`.
    pub fn new(kind: Kind, d: Padic) -> Result<QuadAlgebra> {
        let ok = match kind {
            Kind::Split => d == d.ctx().one(),
            Kind::Inert => d.v() == 0 && !d.is_square()?,
            Kind::Ramified => d.v() == 1,
        };
        if !ok {
            return Err(Error::Config(format!("D = {d} does not define a {kind:?} algebra")));
        }
        Ok(QuadAlgebra { kind, d: d.exact() })
    }

    pub fn split(ctx: &Ctx) -> QuadAlgebra {
        QuadAlgebra { kind: Kind::Split, d: ctx.one() }
    }

    /// `F(√n)` for the smallest non-residue `n`.
    pub fn inert(ctx: &Ctx) -> QuadAlgebra {
        QuadAlgebra { kind: Kind::Inert, d: ctx.int(ctx.nonsquare()) }
    }

    /// `F(√(p·u))`; `u = 1` gives the uniformizer convention `ϖ_E² = ϖ`.
    pub fn ramified(ctx: &Ctx, u: i64) -> QuadAlgebra {
        QuadAlgebra { kind: Kind::Ramified, d: ctx.int(u) * ctx.pi_pow(1) }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn d(&self) -> Padic {
        self.d
    }

    pub fn ctx(&self) -> Ctx {
        self.d.ctx()
    }

    pub fn is_field(&self) -> bool {
        self.kind != Kind::Split
    }

    /// Ramification index.
    pub fn e(&self) -> i32 {
        match self.kind {
            Kind::Ramified => 2,
            _ => 1,
        }
    }

    /// Residue field size of the algebra (a field kind only).
    pub fn q_k(&self) -> i64 {
        let q = self.ctx().q();
        match self.kind {
            Kind::Inert => q * q,
            _ => q,
        }
    }

    /// Conductor of `ψ∘Tr` for an unramified `ψ`.
    pub fn c_psi(&self) -> i32 {
        1 - self.e()
    }

    /// Whether the two algebras are isomorphic (same kind and square class of `D`).
    pub fn isomorphic(&self, o: &QuadAlgebra) -> bool {
        self.kind == o.kind && (self.d / o.d).is_square().unwrap_or(false)
    }

    pub fn elem(&self, a: Padic, b: Padic) -> QuadElem {
        QuadElem { alg: *self, a, b }
    }

    pub fn ints(&self, a: i64, b: i64) -> QuadElem {
        let c = self.ctx();
        self.elem(c.int(a), c.int(b))
    }

    pub fn from_base(&self, a: Padic) -> QuadElem {
        self.elem(a, a.ctx().zero())
    }

    pub fn zero(&self) -> QuadElem {
        self.ints(0, 0)
    }

    pub fn one(&self) -> QuadElem {
        self.ints(1, 0)
    }

    /// `√D`.
    pub fn sqrt_d(&self) -> QuadElem {
        self.ints(0, 1)
    }

    /// Uniformizer: `p` if unramified, `√D` if ramified.
    pub fn uniformizer(&self) -> QuadElem {
        match self.kind {
            Kind::Ramified => self.sqrt_d(),
            _ => self.from_base(self.ctx().pi_pow(1)),
        }
    }

    /// `ϖ_K^k`.
    pub fn pi_pow(&self, k: i32) -> QuadElem {
        match self.kind {
            Kind::Ramified => {
                let half = self.from_base(self.d.powi(k.div_euclid(2) as i64));
                if k.rem_euclid(2) == 1 {
                    half * self.sqrt_d()
                } else {
                    half
                }
            }
            _ => self.from_base(self.ctx().pi_pow(k)),
        }
    }

    /// Split only: the element with coordinates `(x, y)` in `F × F`.
    pub fn from_pair(&self, x: Padic, y: Padic) -> Result<QuadElem> {
        if self.kind != Kind::Split {
            return Err(Error::Config("pair coordinates exist only for the split algebra".into()));
        }
        let half = self.ctx().rational(1, 2);
        Ok(self.elem((x + y) * half, (x - y) * half))
    }

    /// `L(η_{E/F}, 1)`.
    pub fn l_eta(&self) -> Rational64 {
        let q = self.ctx().q();
        match self.kind {
            Kind::Split => Rational64::new(q, q - 1),
            Kind::Inert => Rational64::new(q, q + 1),
            Kind::Ramified => Rational64::from_integer(1),
        }
    }

    /// `Vol(F^×\F^×U_E(e·m + e − 1)) = q^{-m} L(η, 1)`.
    pub fn filtration_volume(&self, m: u32) -> Rational64 {
        self.l_eta() / Rational64::from_integer(self.ctx().q().pow(m))
    }

    /// Total volume of the enumerated part of `F^×\E^×`: 2 if ramified, else 1
    /// (only the unit part of the noncompact split quotient is enumerated).
    pub fn total_volume(&self) -> Rational64 {
        Rational64::from_integer(if self.kind == Kind::Ramified { 2 } else { 1 })
    }

    /// Weighted representatives of `F^×\E^×` modulo `U_E(e·M + e − 1)`.
    pub fn coset_reps(&self, m: u32) -> Result<Vec<(QuadElem, Rational64)>> {
        let c = self.ctx();
        if m == 0 || m + 2 > c.precision() {
            return Err(Error::DepthExceedsPrecision { depth: m, precision: c.precision() });
        }
        let w = self.filtration_volume(m);
        let pm = c.ppow(m) as i64;
        let p = c.p();
        let mut out = Vec::new();
        match self.kind {
            Kind::Inert => {
                for t in 0..pm {
                    out.push((self.elem(c.one(), c.int(t)), w));
                }
                for t in 0..pm / p {
                    out.push((self.elem(c.int(t * p), c.one()), w));
                }
            }
            Kind::Ramified => {
                for t in 0..pm {
                    out.push((self.elem(c.one(), c.int(t)), w));
                }
                for t in 0..pm {
                    out.push((self.elem(c.int(t * p), c.one()), w));
                }
            }
            Kind::Split => {
                for y in 1..pm {
                    if y % p != 0 {
                        out.push((self.from_pair(c.one(), c.int(y))?, w));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Index of the class of `x` in `F^×\E^×/U_E(e·M + e − 1)`: a component tag and a residue.
    pub fn class_key(&self, x: &QuadElem, m: u32) -> Result<(u8, i128)> {
        if x.is_zero() {
            return Err(Error::NonInvertible);
        }
        match self.kind {
            Kind::Inert => {
                if x.a.v() <= x.b.v() {
                    Ok((0, (x.b / x.a).mod_pk(m)?))
                } else {
                    Ok((1, (x.a / x.b).mod_pk(m)?))
                }
            }
            Kind::Ramified => {
                if 2 * x.a.v() < 2 * x.b.v() + 1 {
                    Ok((0, (x.b / x.a).mod_pk(m)?))
                } else {
                    Ok((1, (x.a / x.b).mod_pk(m + 1)?))
                }
            }
            Kind::Split => {
                let (u, w) = x.to_pair();
                if u.is_zero() || w.is_zero() || u.v() != w.v() {
                    return Err(Error::Config("split element outside the enumerated unit part".into()));
                }
                Ok((0, (w / u).mod_pk(m)?))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadElem {
    alg: QuadAlgebra,
    pub a: Padic,
    pub b: Padic,
}

impl PartialEq for QuadElem {
    fn eq(&self, o: &QuadElem) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl QuadElem {
    pub fn alg(&self) -> QuadAlgebra {
        self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> QuadElem {
        QuadElem { alg: self.alg, a: self.a, b: -self.b }
    }

    pub fn norm(&self) -> Padic {
        self.a * self.a - self.b * self.b * self.alg.d
    }

    pub fn trace(&self) -> Padic {
        self.a + self.a
    }

    pub fn scale(&self, s: Padic) -> QuadElem {
        QuadElem { alg: self.alg, a: self.a * s, b: self.b * s }
    }

    /// `x₀ = x − Tr(x)/2`.
    pub fn imaginary_part(&self) -> QuadElem {
        QuadElem { alg: self.alg, a: self.a.ctx().zero(), b: self.b }
    }

    pub fn is_imaginary(&self) -> bool {
        self.a.is_zero()
    }

    pub fn checked_inv(&self) -> Result<QuadElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::NonInvertible);
        }
        let ni = n.inv();
        Ok(self.conj().scale(ni))
    }

    pub fn inv(&self) -> QuadElem {
        self.checked_inv().expect("non-invertible element")
    }

    /// Valuation `v_E`, normalised so that `v_E(ϖ_E) = 1`. Field kinds only.
    pub fn v(&self) -> i32 {
        match self.alg.kind {
            Kind::Inert => self.a.v().min(self.b.v()),
            Kind::Ramified => {
                let va = if self.a.is_zero() { INF } else { 2 * self.a.v() };
                let vb = if self.b.is_zero() { INF } else { 2 * self.b.v() + 1 };
                va.min(vb)
            }
            Kind::Split => panic!("v_E is undefined on a split algebra"),
        }
    }

    pub fn checked_v(&self) -> Result<i32> {
        if self.alg.kind == Kind::Split {
            return Err(Error::SplitKindUnsupported);
        }
        Ok(self.v())
    }

    /// `v_E(x₀) = v_E(x)`.
    pub fn is_minimal_element(&self) -> Result<bool> {
        if self.alg.kind == Kind::Split {
            return Err(Error::SplitKindUnsupported);
        }
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.imaginary_part().v() == self.v())
    }

    /// `γ(t) = t / t̄`, with `Nm γ(t) = 1`.
    pub fn norm_one_map(&self) -> Result<QuadElem> {
        Ok(*self * self.conj().checked_inv()?)
    }

    /// Split only: coordinates in `F × F`.
    pub fn to_pair(&self) -> (Padic, Padic) {
        (self.a + self.b, self.a - self.b)
    }

    pub fn pow(&self, mut e: u64) -> QuadElem {
        let mut base = *self;
        let mut acc = self.alg.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Logarithm on `1 + ϖ_E O_E` (field kinds), or on `1 + pO_E` (split).
    pub fn log(&self) -> Result<QuadElem> {
        let u = *self - self.alg.one();
        if u.is_zero() {
            return Ok(self.alg.zero());
        }
        let ctx = u.a.ctx();
        let (vu, e) = match self.alg.kind {
            Kind::Split => (u.a.v().min(u.b.v()), 1),
            _ => (u.v(), self.alg.e()),
        };
        if vu < 1 {
            return Err(Error::DomainViolation);
        }
        let target = ctx.precision() as i32 + 2;
        let p = ctx.p();
        let mut sum = self.alg.zero();
        let mut upow = u;
        let mut k: i64 = 1;
        while (k as i32 * vu - 1) / e - ilog(k, p) < target {
            let term = upow.scale(ctx.int(k).inv());
            sum = if k % 2 == 1 { sum + term } else { sum - term };
            upow = upow * u;
            k += 1;
        }
        Ok(sum)
    }
}

fn ilog(k: i64, p: i64) -> i32 {
    let mut v = 0;
    let mut pk = p;
    while pk <= k {
        v += 1;
        pk *= p;
    }
    v
}

impl Add for QuadElem {
    type Output = QuadElem;
    fn add(self, o: QuadElem) -> QuadElem {
        QuadElem { alg: self.alg, a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for QuadElem {
    type Output = QuadElem;
    fn sub(self, o: QuadElem) -> QuadElem {
        QuadElem { alg: self.alg, a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { alg: self.alg, a: -self.a, b: -self.b }
    }
}

impl Mul for QuadElem {
    type Output = QuadElem;
    fn mul(self, o: QuadElem) -> QuadElem {
        let d = self.alg.d;
        QuadElem { alg: self.alg, a: self.a * o.a + self.b * o.b * d, b: self.a * o.b + self.b * o.a }
    }
}

impl std::fmt::Display for QuadElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) + ({})√D", self.a, self.b)
    }
}
