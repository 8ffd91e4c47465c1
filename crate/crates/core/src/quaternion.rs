//! Quaternion algebras in the pair model `B = L ⊕ Lj`, `j² = γ`, `jl = l̄j`,
//! with the semi-valuation `ν` attached to `L`, torus embeddings and the
//! explicit 2×2 model on the matrix side.

use crate::error::{Error, Result};
use crate::padic::{hilbert_symbol, Ctx, Padic, INF};
use crate::quad::{Kind, QuadAlgebra, QuadElem};
use num_rational::Rational64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Matrix,
    Division,
}

impl Side {
    pub fn sign(&self) -> i32 {
        match self {
            Side::Matrix => 1,
            Side::Division => -1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuatAlgebra {
    l: QuadAlgebra,
    gamma: Padic,
}

impl QuatAlgebra {
    pub fn new(l: QuadAlgebra, gamma: Padic) -> Result<QuatAlgebra> {
        if !l.is_field() {
            return Err(Error::SplitKindUnsupported);
        }
        if gamma.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(QuatAlgebra { l, gamma })
    }

    /// `γ` normalised so that `v_L(γ) = ε_{B,L}`.
    pub fn on_side(l: QuadAlgebra, side: Side) -> Result<QuatAlgebra> {
        let c = l.ctx();
        let gamma = match (side, l.kind()) {
            (Side::Matrix, _) => c.one(),
            (Side::Division, Kind::Inert) => c.pi_pow(1),
            (Side::Division, Kind::Ramified) => c.int(c.nonsquare()),
            (_, Kind::Split) => return Err(Error::SplitKindUnsupported),
        };
        QuatAlgebra::new(l, gamma)
    }

    pub fn l(&self) -> QuadAlgebra {
        self.l
    }

    pub fn gamma(&self) -> Padic {
        self.gamma
    }

    pub fn ctx(&self) -> Ctx {
        self.l.ctx()
    }

    /// `ε(B)`: +1 iff `γ ∈ Nm(L^×)`.
    pub fn epsilon(&self) -> i32 {
        hilbert_symbol(&self.gamma, &self.l.d()).unwrap()
    }

    pub fn side(&self) -> Side {
        if self.epsilon() == 1 {
            Side::Matrix
        } else {
            Side::Division
        }
    }

    /// `ε_{B,L}`: 0 on the matrix side, `2 − e_L` on the division side.
    pub fn eps_bl(&self) -> i32 {
        if self.epsilon() == 1 {
            0
        } else {
            2 - self.l.e()
        }
    }

    /// `v_L(γ)`.
    pub fn v_gamma(&self) -> i32 {
        self.l.e() * self.gamma.v()
    }

    pub fn elem(&self, x: QuadElem, y: QuadElem) -> QuatElem {
        QuatElem { x, y, gamma: self.gamma }
    }

    pub fn from_l(&self, x: QuadElem) -> QuatElem {
        self.elem(x, self.l.zero())
    }

    pub fn from_base(&self, a: Padic) -> QuatElem {
        self.from_l(self.l.from_base(a))
    }

    pub fn one(&self) -> QuatElem {
        self.from_l(self.l.one())
    }

    pub fn zero(&self) -> QuatElem {
        self.from_l(self.l.zero())
    }

    pub fn j(&self) -> QuatElem {
        self.elem(self.l.zero(), self.l.one())
    }

    /// The embedding `a + b√D_E ↦ a + bβ` with `β` found by fixing the `L`-coordinate
    /// `s√D_L` and solving `Nm_L(l₁) = (D_E − s² D_L)/γ`.
    pub fn embed_second_torus(&self, e: &QuadAlgebra) -> Result<TorusEmbedding> {
        if self.epsilon() == -1 && e.kind() == Kind::Split {
            return Err(Error::NoEmbedding);
        }
        let c = self.ctx();
        if e.isomorphic(&self.l) {
            let s = (e.d() / self.l.d()).sqrt().unwrap();
            return TorusEmbedding::new(*e, self.from_l(self.l.sqrt_d().scale(s)));
        }
        for k in [0, 1, -1, 2] {
            for r in 0..c.p() {
                let s = c.int(r) * c.pi_pow(k);
                if let Ok(t) = self.embed_with_coordinate(e, s) {
                    return Ok(t);
                }
            }
        }
        Err(Error::NoEmbedding)
    }

    /// `β = s√D_L + l₁ j`, or `NoSolution` if `(D_E − s²D_L)/γ` is not a norm from `L`.
    pub fn embed_with_coordinate(&self, e: &QuadAlgebra, s: Padic) -> Result<TorusEmbedding> {
        let target = (e.d() - s * s * self.l.d()) / self.gamma;
        let l1 = solve_norm(&self.l, &target)?;
        TorusEmbedding::new(*e, self.elem(self.l.sqrt_d().scale(s), l1))
    }

    /// The 2×2 model: `a + b√D ↦ [[a, b], [bD, a]]`, `j ↦ diag(−1, 1)`.
    pub fn matrix_model(&self, g: &QuatElem) -> Result<Mat2> {
        self.require_matrix_model()?;
        let (a, b) = (g.x.a, g.x.b);
        let (c, d) = (g.y.a, g.y.b);
        let dd = self.l.d();
        Ok(Mat2([[a - c, b + d], [(b - d) * dd, a + c]]))
    }

    pub fn from_matrix(&self, m: &Mat2) -> Result<QuatElem> {
        self.require_matrix_model()?;
        let c = self.ctx();
        let half = c.rational(1, 2);
        let [[p11, p12], [p21, p22]] = m.0;
        let r = p21 / self.l.d();
        let x = self.l.elem((p11 + p22) * half, (p12 + r) * half);
        let y = self.l.elem((p22 - p11) * half, (p12 - r) * half);
        Ok(self.elem(x, y))
    }

    fn require_matrix_model(&self) -> Result<()> {
        if self.epsilon() != 1 {
            return Err(Error::DivisionSideUnsupported);
        }
        if self.gamma != self.ctx().one() {
            return Err(Error::Config("matrix model requires j² = 1".into()));
        }
        Ok(())
    }
}

/// Solves `Nm_L(l) = t` by scanning either coordinate and taking a square root in the other.
pub fn solve_norm(l: &QuadAlgebra, t: &Padic) -> Result<QuadElem> {
    if t.is_zero() {
        return Err(Error::ZeroInput);
    }
    if hilbert_symbol(t, &l.d())? != 1 {
        return Err(Error::NoSolution);
    }
    let c = l.ctx();
    let lo = t.v().div_euclid(2) - 1;
    for k in lo..lo + 4 {
        for r in 0..c.p() {
            let b = c.int(r) * c.pi_pow(k);
            let rhs = *t + l.d() * b * b;
            if rhs.is_zero() {
                continue;
            }
            if let Some(a) = rhs.sqrt() {
                let sol = l.elem(a, b);
                if sol.norm() == *t {
                    return Ok(sol);
                }
            }
            let a = b;
            let rhs = (a * a - *t) / l.d();
            if rhs.is_zero() {
                continue;
            }
            if let Some(b) = rhs.sqrt() {
                let sol = l.elem(a, b);
                if sol.norm() == *t {
                    return Ok(sol);
                }
            }
        }
    }
    Err(Error::PrecisionExhausted("norm equation"))
}

#[derive(Clone, Copy, Debug)]
pub struct QuatElem {
    pub x: QuadElem,
    pub y: QuadElem,
    gamma: Padic,
}

impl PartialEq for QuatElem {
    fn eq(&self, o: &QuatElem) -> bool {
        self.x == o.x && self.y == o.y
    }
}

impl QuatElem {
    pub fn l(&self) -> QuadAlgebra {
        self.x.alg()
    }

    pub fn gamma(&self) -> Padic {
        self.gamma
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn norm(&self) -> Padic {
        self.x.norm() - self.gamma * self.y.norm()
    }

    pub fn trace(&self) -> Padic {
        self.x.trace()
    }

    pub fn conj(&self) -> QuatElem {
        QuatElem { x: self.x.conj(), y: -self.y, gamma: self.gamma }
    }

    pub fn scale(&self, s: Padic) -> QuatElem {
        QuatElem { x: self.x.scale(s), y: self.y.scale(s), gamma: self.gamma }
    }

    pub fn checked_inv(&self) -> Result<QuatElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::NonInvertible);
        }
        Ok(self.conj().scale(n.inv()))
    }

    pub fn inv(&self) -> QuatElem {
        self.checked_inv().expect("non-invertible quaternion")
    }

    /// `⟨g, h⟩ = Tr(gh)`.
    pub fn pair(&self, h: &QuatElem) -> Padic {
        (*self * *h).trace()
    }

    /// `2ν(g)`, or `INF` for zero.
    pub fn nu2(&self) -> i32 {
        let vx = if self.x.is_zero() { INF } else { 2 * self.x.v() };
        let vy = if self.y.is_zero() {
            INF
        } else {
            2 * self.y.v() + self.l().e() * self.gamma.v()
        };
        vx.min(vy)
    }

    pub fn semi_valuation(&self) -> Result<Rational64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(Rational64::new(self.nu2() as i64, 2))
    }

    /// `g ∈ B^n`, with `n` given in halves.
    pub fn in_lattice2(&self, n2: i32) -> bool {
        self.nu2() >= n2
    }

    /// `g ∈ K_A(n) = 1 + B^n`, with `n` given in halves.
    pub fn in_k2(&self, n2: i32) -> bool {
        let one = QuatElem { x: self.x.alg().one(), y: self.x.alg().zero(), gamma: self.gamma };
        (*self - one).nu2() >= n2
    }

    /// `(x, yj)`: components in `L` and `L^⊥ = Lj`.
    pub fn orthogonal_decompose(&self) -> (QuatElem, QuatElem) {
        let z = self.x.alg().zero();
        (
            QuatElem { x: self.x, y: z, gamma: self.gamma },
            QuatElem { x: z, y: self.y, gamma: self.gamma },
        )
    }

    /// Exponential series for `ν(g) > 0`.
    pub fn exp(&self) -> Result<QuatElem> {
        let n2 = self.nu2();
        let one = QuatElem { x: self.x.alg().one(), y: self.x.alg().zero(), gamma: self.gamma };
        if n2 == INF {
            return Ok(one);
        }
        if n2 <= 0 {
            return Err(Error::DomainViolation);
        }
        let ctx = self.x.a.ctx();
        let e = self.l().e();
        let p = ctx.p() as i32;
        let target = 2 * e * (ctx.precision() as i32 + 2);
        let mut sum = one;
        let mut term = one;
        let mut k = 1i32;
        while k * n2 - 2 * e * ((k - 1) / (p - 1)) < target {
            term = (term * *self).scale(ctx.int(k as i64).inv());
            sum = sum + term;
            k += 1;
        }
        Ok(sum)
    }

    pub fn commutator(&self, h: &QuatElem) -> QuatElem {
        *self * *h - *h * *self
    }
}

impl Add for QuatElem {
    type Output = QuatElem;
    fn add(self, o: QuatElem) -> QuatElem {
        QuatElem { x: self.x + o.x, y: self.y + o.y, gamma: self.gamma }
    }
}

impl Sub for QuatElem {
    type Output = QuatElem;
    fn sub(self, o: QuatElem) -> QuatElem {
        QuatElem { x: self.x - o.x, y: self.y - o.y, gamma: self.gamma }
    }
}

impl Neg for QuatElem {
    type Output = QuatElem;
    fn neg(self) -> QuatElem {
        QuatElem { x: -self.x, y: -self.y, gamma: self.gamma }
    }
}

impl Mul for QuatElem {
    type Output = QuatElem;
    fn mul(self, o: QuatElem) -> QuatElem {
        let g = self.x.alg().from_base(self.gamma);
        QuatElem {
            x: self.x * o.x + g * self.y * o.y.conj(),
            y: self.x * o.y + self.y * o.x.conj(),
            gamma: self.gamma,
        }
    }
}

/// An embedding of a quadratic algebra `E` into `B` through the image `β` of `√D_E`.
#[derive(Clone, Copy, Debug)]
pub struct TorusEmbedding {
    pub e: QuadAlgebra,
    pub beta: QuatElem,
    pub j_e: QuatElem,
}

impl TorusEmbedding {
    pub fn new(e: QuadAlgebra, beta: QuatElem) -> Result<TorusEmbedding> {
        if !beta.trace().is_zero() || (beta * beta).x != beta.l().from_base(e.d()) || !(beta * beta).y.is_zero() {
            return Err(Error::Config("β is not a square root of D_E".into()));
        }
        let l = beta.l();
        let z = l.zero();
        let cands = [
            QuatElem { x: z, y: l.one(), gamma: beta.gamma },
            QuatElem { x: z, y: l.sqrt_d(), gamma: beta.gamma },
            QuatElem { x: l.sqrt_d(), y: z, gamma: beta.gamma },
        ];
        let mut tmp = TorusEmbedding { e, beta, j_e: cands[0] };
        for cand in cands {
            let (_, perp) = tmp.decompose_relative(&cand)?;
            if !perp.norm().is_zero() {
                tmp.j_e = perp;
                return Ok(tmp);
            }
        }
        Err(Error::DegenerateGram)
    }

    pub fn image(&self, t: &QuadElem) -> QuatElem {
        let g = self.beta.gamma;
        let l = self.beta.l();
        QuatElem { x: l.from_base(t.a), y: l.zero(), gamma: g } + self.beta.scale(t.b)
    }

    /// Projection onto `F[β]` and its trace-orthogonal complement.
    pub fn decompose_relative(&self, g: &QuatElem) -> Result<(QuatElem, QuatElem)> {
        let l = self.beta.l();
        let one = QuatElem { x: l.one(), y: l.zero(), gamma: self.beta.gamma };
        let tb = self.beta.trace();
        let tbb = self.beta.pair(&self.beta);
        let two = l.ctx().int(2);
        let det = two * tbb - tb * tb;
        if det.is_zero() {
            return Err(Error::DegenerateGram);
        }
        let r0 = g.trace();
        let r1 = g.pair(&self.beta);
        let c0 = (tbb * r0 - tb * r1) / det;
        let c1 = (two * r1 - tb * r0) / det;
        let par = one.scale(c0) + self.beta.scale(c1);
        Ok((par, *g - par))
    }

    /// Coordinates `(a, b)` of an element of the embedded torus.
    pub fn preimage(&self, g: &QuatElem) -> Result<QuadElem> {
        let (par, perp) = self.decompose_relative(g)?;
        if !perp.is_zero() {
            return Err(Error::OutsideDomain);
        }
        let tbb = self.beta.pair(&self.beta);
        let b = par.pair(&self.beta) / tbb;
        let a = par.trace() / self.e.ctx().int(2);
        Ok(self.e.elem(a, b))
    }
}

/// A 2×2 matrix over the base field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Padic; 2]; 2]);

impl Mat2 {
    pub fn new(a: Padic, b: Padic, c: Padic, d: Padic) -> Mat2 {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity(ctx: &Ctx) -> Mat2 {
        Mat2::new(ctx.one(), ctx.zero(), ctx.zero(), ctx.one())
    }

    pub fn det(&self) -> Padic {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Padic {
        self.0[0][0] + self.0[1][1]
    }

    pub fn inv(&self) -> Result<Mat2> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::NonInvertible);
        }
        let di = d.inv();
        let [[a, b], [c, e]] = self.0;
        Ok(Mat2::new(e * di, -b * di, -c * di, a * di))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let f = |i: usize, k: usize| a[i][0] * b[0][k] + a[i][1] * b[1][k];
        Mat2([[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]])
    }
}
