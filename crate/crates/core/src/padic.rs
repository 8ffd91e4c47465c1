//! Bounded-precision arithmetic in the p-adic rationals.
//!
//! A nonzero element is stored as `p^val * unit` where `unit` is a unit known
//! modulo `p^prec`. Multiplication keeps the smaller relative precision;
//! addition loses one digit for every digit that cancels.

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Valuation reported for the zero marker.
pub const INF: i32 = i32::MAX / 4;

/// Shared field context: the prime and the working relative precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ctx {
    p: i64,
    n: u32,
    pn: i128,
}

impl Ctx {
    pub fn new(p: i64, n: u32) -> Result<Ctx> {
        if p < 5 || !is_prime(p) {
            return Err(Error::Config(format!("p = {p} must be a prime >= 5")));
        }
        if n == 0 {
            return Err(Error::Config("precision must be positive".into()));
        }
        let mut pn: i128 = 1;
        for _ in 0..n {
            pn *= p as i128;
            if pn >= 1i128 << 62 {
                return Err(Error::Config(format!("p^{n} overflows the 62-bit unit window")));
            }
        }
        Ok(Ctx { p, n, pn })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Residue field size of the base field.
    pub fn q(&self) -> i64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> i128 {
        self.pn
    }

    pub fn ppow(&self, k: u32) -> i128 {
        (self.p as i128).pow(k)
    }

    pub fn zero(&self) -> Padic {
        Padic { ctx: *self, repr: Repr::Zero }
    }

    pub fn one(&self) -> Padic {
        self.int(1)
    }

    pub fn int(&self, x: i64) -> Padic {
        self.from_i128(x as i128)
    }

    pub fn from_i128(&self, x: i128) -> Padic {
        if x == 0 {
            return self.zero();
        }
        let p = self.p as i128;
        let (mut v, mut u) = (0i32, x);
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        Padic::raw(*self, v, u, self.n)
    }

    pub fn rational(&self, num: i64, den: i64) -> Padic {
        assert!(den != 0, "zero denominator");
        self.int(num) / self.int(den)
    }

    /// `p^k` for any integer `k`.
    pub fn pi_pow(&self, k: i32) -> Padic {
        Padic::raw(*self, k, 1, self.n)
    }

    /// The unit `u` (taken mod p^N) scaled by `p^k`.
    pub fn monomial(&self, k: i32, u: i128) -> Padic {
        let x = self.from_i128(u.rem_euclid(self.pn));
        x * self.pi_pow(k)
    }

    /// Smallest positive quadratic non-residue mod p.
    pub fn nonsquare(&self) -> i64 {
        (2..self.p).find(|&a| legendre(a, self.p) == -1).unwrap()
    }

    /// Smallest generator of the multiplicative group mod p.
    pub fn generator(&self) -> i64 {
        let p = self.p;
        (2..p)
            .find(|&g| {
                let mut x = 1i64;
                for k in 1..p - 1 {
                    x = x * g % p;
                    if x == 1 {
                        return k == p - 1;
                    }
                }
                true
            })
            .unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    Zero,
    Num { val: i32, unit: i128, prec: u32 },
}

#[derive(Clone, Copy)]
pub struct Padic {
    ctx: Ctx,
    repr: Repr,
}

impl Padic {
    fn raw(ctx: Ctx, val: i32, unit: i128, prec: u32) -> Padic {
        let m = ctx.ppow(prec);
        let unit = unit.rem_euclid(m);
        debug_assert!(unit % ctx.p as i128 != 0);
        Padic { ctx, repr: Repr::Num { val, unit, prec } }
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Valuation, or [`INF`] for the zero marker.
    pub fn v(&self) -> i32 {
        match self.repr {
            Repr::Zero => INF,
            Repr::Num { val, .. } => val,
        }
    }

    /// Unit part modulo `p^prec` (0 for the zero marker).
    pub fn unit(&self) -> i128 {
        match self.repr {
            Repr::Zero => 0,
            Repr::Num { unit, .. } => unit,
        }
    }

    /// Relative precision in digits (`u32::MAX` for the exact zero).
    pub fn prec(&self) -> u32 {
        match self.repr {
            Repr::Zero => u32::MAX,
            Repr::Num { prec, .. } => prec,
        }
    }

    /// Leading digit of the unit part, in `1..p`.
    pub fn residue(&self) -> i64 {
        (self.unit() % self.ctx.p as i128) as i64
    }

    /// Same value, relative precision reset to the full working precision.
    pub fn exact(&self) -> Padic {
        match self.repr {
            Repr::Zero => *self,
            Repr::Num { val, unit, .. } => Padic::raw(self.ctx, val, unit, self.ctx.n),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.v() >= 0
    }

    pub fn is_unit(&self) -> bool {
        self.v() == 0
    }

    /// Residue of an integral element modulo `p^k`, as an integer in `0..p^k`.
    pub fn mod_pk(&self, k: u32) -> Result<i128> {
        let m = self.ctx.ppow(k);
        match self.repr {
            Repr::Zero => Ok(0),
            Repr::Num { val, unit, prec } => {
                if val < 0 {
                    return Err(Error::DomainViolation);
                }
                if val as u32 >= k {
                    return Ok(0);
                }
                if val as u32 + prec < k {
                    return Err(Error::PrecisionExhausted("residue requested beyond known digits"));
                }
                Ok((self.ctx.ppow(val as u32) * unit).rem_euclid(m))
            }
        }
    }

    /// Fractional part `x mod Z_p`, as `(numerator, p^k)` with `0 <= numerator < p^k`.
    pub fn frac(&self) -> Result<(i128, i128)> {
        match self.repr {
            Repr::Zero => Ok((0, 1)),
            Repr::Num { val, unit, prec } => {
                if val >= 0 {
                    return Ok((0, 1));
                }
                let k = (-val) as u32;
                if prec < k {
                    return Err(Error::PrecisionExhausted("fractional part beyond known digits"));
                }
                let m = self.ctx.ppow(k);
                Ok((unit.rem_euclid(m), m))
            }
        }
    }

    pub fn checked_inv(&self) -> Result<Padic> {
        match self.repr {
            Repr::Zero => Err(Error::DivisionByZero),
            Repr::Num { val, unit, prec } => {
                let m = self.ctx.ppow(prec);
                Ok(Padic::raw(self.ctx, -val, mod_inverse(unit, m), prec))
            }
        }
    }

    pub fn inv(&self) -> Padic {
        self.checked_inv().expect("inverse of zero")
    }

    pub fn checked_div(&self, b: &Padic) -> Result<Padic> {
        Ok(*self * b.checked_inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Padic {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Padic {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().pow((-e) as u64)
        }
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i32) -> Padic {
        match self.repr {
            Repr::Zero => *self,
            Repr::Num { val, unit, prec } => Padic { ctx: self.ctx, repr: Repr::Num { val: val + k, unit, prec } },
        }
    }

    /// Drop digits so that the value is known modulo `p^abs` at most.
    pub fn truncate_abs(&self, abs: i32) -> Padic {
        match self.repr {
            Repr::Zero => *self,
            Repr::Num { val, unit, prec } => {
                if val >= abs {
                    return self.ctx.zero();
                }
                let keep = ((abs - val) as u32).min(prec);
                Padic::raw(self.ctx, val, unit, keep)
            }
        }
    }

    /// `true` iff `p^val * unit` is a square.
    pub fn is_square(&self) -> Result<bool> {
        match self.repr {
            Repr::Zero => Err(Error::ZeroInput),
            Repr::Num { val, .. } => Ok(val % 2 == 0 && legendre(self.residue(), self.ctx.p) == 1),
        }
    }

    /// A square root, if one exists, lifted by Newton iteration.
    pub fn sqrt(&self) -> Option<Padic> {
        match self.repr {
            Repr::Zero => Some(*self),
            Repr::Num { val, unit, prec } => {
                if val % 2 != 0 || legendre(self.residue(), self.ctx.p) != 1 {
                    return None;
                }
                let p = self.ctx.p;
                let r0 = (1..p).find(|&r| (r * r - self.residue()) % p == 0).unwrap();
                let u = Padic::raw(self.ctx, 0, unit, prec);
                let mut r = self.ctx.int(r0);
                let two = self.ctx.int(2);
                for _ in 0..=(prec as usize).ilog2() + 2 {
                    r = r - (r * r - u) / (two * r);
                }
                Some(r.truncate_abs(prec as i32).shift(val / 2))
            }
        }
    }

    /// p-adic logarithm on `1 + pZ_p`.
    pub fn plog(&self) -> Result<Padic> {
        let u = *self - self.ctx.one();
        if u.is_zero() {
            return Ok(self.ctx.zero());
        }
        let vu = u.v();
        if vu < 1 {
            return Err(Error::DomainViolation);
        }
        let target = vu + self.ctx.n as i32;
        let p = self.ctx.p;
        let mut sum = self.ctx.zero();
        let mut upow = u;
        let mut k: i64 = 1;
        while k as i32 * vu - ilog(k, p) < target {
            let term = upow / self.ctx.int(k);
            sum = if k % 2 == 1 { sum + term } else { sum - term };
            upow = upow * u;
            k += 1;
        }
        Ok(sum.truncate_abs(target))
    }

    /// p-adic exponential on `pZ_p`.
    pub fn pexp(&self) -> Result<Padic> {
        if self.is_zero() {
            return Ok(self.ctx.one());
        }
        let vy = self.v();
        if vy < 1 {
            return Err(Error::DomainViolation);
        }
        let target = self.ctx.n as i32;
        let mut sum = self.ctx.one();
        let mut term = self.ctx.one();
        let mut k: i64 = 1;
        while k as i32 * vy - (k as i32 - 1) / (self.ctx.p as i32 - 1) < target {
            term = term * *self / self.ctx.int(k);
            sum = sum + term;
            k += 1;
        }
        Ok(sum.truncate_abs(target))
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

impl PartialEq for Padic {
    fn eq(&self, other: &Padic) -> bool {
        (*self - *other).is_zero()
    }
}

impl Add for Padic {
    type Output = Padic;
    fn add(self, b: Padic) -> Padic {
        debug_assert_eq!(self.ctx, b.ctx);
        let (a, b) = match (self.repr, b.repr) {
            (Repr::Zero, _) => return b,
            (_, Repr::Zero) => return self,
            (Repr::Num { val: va, .. }, Repr::Num { val: vb, .. }) => {
                if va <= vb {
                    (self, b)
                } else {
                    (b, self)
                }
            }
        };
        let (Repr::Num { val: va, unit: ua, prec: pa }, Repr::Num { val: vb, unit: ub, prec: pb }) = (a.repr, b.repr) else {
            unreachable!()
        };
        let ctx = self.ctx;
        let abs = (va as i64 + pa as i64).min(vb as i64 + pb as i64);
        let rel = (abs - va as i64) as u32;
        let m = ctx.ppow(rel);
        let d = (vb - va) as u32;
        let mut s = ua % m;
        if d < rel {
            s = (s + ctx.ppow(d) * (ub % m)) % m;
        }
        if s == 0 {
            return ctx.zero();
        }
        let p = ctx.p as i128;
        let mut k = 0u32;
        while s % p == 0 {
            s /= p;
            k += 1;
        }
        Padic::raw(ctx, va + k as i32, s, rel - k)
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        match self.repr {
            Repr::Zero => self,
            Repr::Num { val, unit, prec } => Padic::raw(self.ctx, val, -unit, prec),
        }
    }
}

impl Sub for Padic {
    type Output = Padic;
    fn sub(self, b: Padic) -> Padic {
        self + (-b)
    }
}

impl Mul for Padic {
    type Output = Padic;
    fn mul(self, b: Padic) -> Padic {
        debug_assert_eq!(self.ctx, b.ctx);
        match (self.repr, b.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => self.ctx.zero(),
            (Repr::Num { val: va, unit: ua, prec: pa }, Repr::Num { val: vb, unit: ub, prec: pb }) => {
                let prec = pa.min(pb);
                let m = self.ctx.ppow(prec);
                Padic::raw(self.ctx, va + vb, (ua % m) * (ub % m), prec)
            }
        }
    }
}

impl Div for Padic {
    type Output = Padic;
    fn div(self, b: Padic) -> Padic {
        self.checked_div(&b).expect("division by zero")
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Num { val, unit, prec } => write!(f, "{}^{}*{} (+O({}^{}))", self.ctx.p, val, unit, self.ctx.p, prec),
        }
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Legendre symbol `(a/p)` for odd prime `p`.
pub fn legendre(a: i64, p: i64) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let mut b = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

pub fn mod_inverse(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    s0.rem_euclid(m)
}

/// Hilbert symbol `(a, b)` over the p-adic rationals, p odd.
pub fn hilbert_symbol(a: &Padic, b: &Padic) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = a.ctx.p;
    let (al, be) = (a.v() as i64, b.v() as i64);
    let mut s = 1;
    if (al * be).rem_euclid(2) == 1 && ((p - 1) / 2) % 2 == 1 {
        s = -s;
    }
    if be.rem_euclid(2) == 1 {
        s *= legendre(a.residue(), p);
    }
    if al.rem_euclid(2) == 1 {
        s *= legendre(b.residue(), p);
    }
    Ok(s)
}

/// Teichmüller lift of a nonzero residue class.
pub fn teichmuller(ctx: &Ctx, r: i64) -> Result<Padic> {
    let p = ctx.p;
    if r.rem_euclid(p) == 0 {
        return Err(Error::ZeroResidue);
    }
    let m = ctx.pn;
    let mut x = (r as i128).rem_euclid(m);
    for _ in 0..ctx.n {
        x = pow_mod(x, p as u128, m);
    }
    Ok(ctx.from_i128(x))
}

pub fn pow_mod(mut b: i128, mut e: u128, m: i128) -> i128 {
    let mut r = 1i128;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carry_into_valuation() {
        let c = Ctx::new(5, 3).unwrap();
        let s = c.int(2) + c.int(3);
        assert_eq!((s.v(), s.unit()), (1, 1));
        assert!((c.int(7) - c.int(7)).is_zero());
    }

    #[test]
    fn sqrt_roundtrip() {
        let c = Ctx::new(7, 10).unwrap();
        let x = c.int(2);
        let r = x.sqrt().unwrap();
        assert_eq!(r * r, x);
        assert!(c.int(3).sqrt().is_none());
    }
}
