//! Period problems `(π, E, χ)`: conductors, the ε-test, geometric existence of
//! test vectors, aligned torus embeddings, brute-force period integrals and
//! their closed-form sizes.

use crate::cuspidal::{Coefficient, CuspidalDatum};
use crate::error::{Error, Result};
use crate::padic::{hilbert_symbol, legendre, teichmuller, Ctx, Padic};
use crate::phase::{psi, small_conductor_alpha, MultChar, Phase};
use crate::quad::{Kind, QuadAlgebra, QuadElem};
use crate::quaternion::{QuatAlgebra, Side, TorusEmbedding};
use crate::registry::{Named, Registry};
use crate::report::{ser_complex, ser_rational, ser_rationals};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::TAU;

/// A character of `F^×`:
/// `χ(p^m ω(ζ)(1+u)) = m·unif + tame·ind(ζ)/(p − 1) + ψ(α log(1+u))`.
#[derive(Clone, Debug)]
pub struct BaseChar {
    ctx: Ctx,
    alpha: Option<Padic>,
    tame: i64,
    unif: Phase,
}

impl BaseChar {
    pub fn new(ctx: Ctx, alpha: Option<Padic>, tame: i64, unif: Phase) -> BaseChar {
        BaseChar { ctx, alpha, tame: tame.rem_euclid(ctx.p() - 1), unif }
    }

    pub fn trivial(ctx: Ctx) -> BaseChar {
        BaseChar::new(ctx, None, 0, Phase::zero())
    }

    pub fn alpha(&self) -> Option<Padic> {
        self.alpha
    }

    fn effective_alpha(&self) -> Option<Padic> {
        self.alpha.filter(|a| !a.is_zero() && a.v() <= -2)
    }

    fn dlog(&self, r: i64) -> i64 {
        let p = self.ctx.p();
        let g = self.ctx.generator();
        let mut x = 1;
        for k in 0..p - 1 {
            if x == r.rem_euclid(p) {
                return k;
            }
            x = x * g % p;
        }
        unreachable!("residue is a unit")
    }

    pub fn eval(&self, x: &Padic) -> Result<Phase> {
        if x.is_zero() {
            return Err(Error::NonInvertible);
        }
        let m = x.v();
        let u = x.shift(-m);
        let r = u.residue();
        let mut ph = self.unif.times(m as i64) + Phase::frac(self.tame * self.dlog(r), self.ctx.p() - 1);
        if let Some(a) = self.effective_alpha() {
            let w = teichmuller(&self.ctx, r)?;
            ph = ph + psi(&(a * (u / w).plog()?))?;
        }
        Ok(ph)
    }

    pub fn conductor(&self) -> i32 {
        match self.effective_alpha() {
            Some(a) => -a.v(),
            None => (self.tame != 0) as i32,
        }
    }

    pub fn conductor_scan(&self) -> Result<i32> {
        let c = self.ctx;
        for k in (1..=c.precision() as i32 - 3).rev() {
            for r in 1..c.p() {
                if !self.eval(&(c.one() + c.int(r) * c.pi_pow(k)))?.is_zero() {
                    return Ok(k + 1);
                }
            }
        }
        for r in 1..c.p() {
            if !self.eval(&teichmuller(&c, r)?)?.is_zero() {
                return Ok(1);
            }
        }
        Ok(0)
    }

    pub fn inverse(&self) -> BaseChar {
        BaseChar::new(self.ctx, self.alpha.map(|a| -a), -self.tame, -self.unif)
    }
}

/// A character of `E^×` for an étale quadratic algebra `E`.
#[derive(Clone, Debug)]
pub enum TorusChar {
    Field(MultChar),
    Split { alg: QuadAlgebra, chi1: BaseChar, chi2: BaseChar },
}

impl TorusChar {
    pub fn alg(&self) -> QuadAlgebra {
        match self {
            TorusChar::Field(m) => m.alg(),
            TorusChar::Split { alg, .. } => *alg,
        }
    }

    pub fn eval(&self, t: &QuadElem) -> Result<Phase> {
        match self {
            TorusChar::Field(m) => m.eval(t),
            TorusChar::Split { chi1, chi2, .. } => {
                let (x, y) = t.to_pair();
                Ok(chi1.eval(&x)? + chi2.eval(&y)?)
            }
        }
    }

    /// `c(χ)` from the data.
    pub fn conductor(&self) -> i32 {
        match self {
            TorusChar::Field(m) => m.conductor(),
            TorusChar::Split { chi1, chi2, .. } => chi1.conductor().max(chi2.conductor()),
        }
    }

    /// `c(π_χ)` from the data.
    pub fn conductor_pi(&self) -> i32 {
        match self {
            TorusChar::Field(m) => dihedral_conductor(&m.alg(), m.conductor()),
            TorusChar::Split { chi1, chi2, .. } => chi1.conductor() + chi2.conductor(),
        }
    }

    /// `c(π_χ)` with the character conductors found by scanning.
    pub fn conductor_pi_scan(&self) -> Result<i32> {
        Ok(match self {
            TorusChar::Field(m) => dihedral_conductor(&m.alg(), m.conductor_scan()?),
            TorusChar::Split { chi1, chi2, .. } => chi1.conductor_scan()? + chi2.conductor_scan()?,
        })
    }

    /// Imaginary part of the wild element `α_χ`; for conductor at most one the
    /// stored representative is used, or `ϖ_E^{−c + c(ψ_E)}` when none is stored.
    pub fn alpha_imag(&self) -> QuadElem {
        match self {
            TorusChar::Field(m) => {
                let a = m.alpha().unwrap_or_else(|| small_conductor_alpha(&m.alg(), m.conductor()));
                a.imaginary_part()
            }
            TorusChar::Split { alg, chi1, chi2 } => {
                let c = alg.ctx();
                let a1 = chi1.alpha().unwrap_or(c.zero());
                let a2 = chi2.alpha().unwrap_or(c.zero());
                alg.elem(c.zero(), (a1 - a2) * c.rational(1, 2))
            }
        }
    }

    /// Values on `p`, `ω(g_F)`, `1 + p`.
    pub fn central_values(&self) -> Result<[Phase; 3]> {
        let e = self.alg();
        let c = e.ctx();
        let g = teichmuller(&c, c.generator())?;
        let gens = [c.pi_pow(1), g, c.int(1 + c.p())];
        let mut out = [Phase::zero(); 3];
        for (o, x) in out.iter_mut().zip(gens) {
            *o = self.eval(&e.from_base(x))?;
        }
        Ok(out)
    }

    pub fn conjugate(&self) -> TorusChar {
        match self {
            TorusChar::Field(m) => TorusChar::Field(m.conjugate()),
            TorusChar::Split { alg, chi1, chi2 } => TorusChar::Split { alg: *alg, chi1: chi2.clone(), chi2: chi1.clone() },
        }
    }
}

/// `c(π_χ)` for a character of a quadratic field of conductor `c`.
pub fn dihedral_conductor(e: &QuadAlgebra, c: i32) -> i32 {
    match e.kind() {
        Kind::Inert => 2 * c,
        _ => c + 1,
    }
}

/// `(π, E, χ)` with matching central characters.
#[derive(Clone, Debug)]
pub struct PeriodProblem {
    datum: CuspidalDatum,
    chi: TorusChar,
}

impl PeriodProblem {
    pub fn new(datum: CuspidalDatum, chi: TorusChar) -> Result<PeriodProblem> {
        let e = chi.alg();
        if e.isomorphic(&datum.l()) && e.d() != datum.l().d() {
            return Err(Error::Config("an E isomorphic to L must use the same D".into()));
        }
        if datum.theta().central_values()? != chi.central_values()? {
            return Err(Error::CentralMismatch);
        }
        Ok(PeriodProblem { datum, chi })
    }

    pub fn datum(&self) -> &CuspidalDatum {
        &self.datum
    }

    pub fn chi(&self) -> &TorusChar {
        &self.chi
    }

    pub fn e(&self) -> QuadAlgebra {
        self.chi.alg()
    }

    pub fn same_torus(&self) -> bool {
        self.e().isomorphic(&self.datum.l())
    }

    /// `(θχ⁻¹, θχ̄⁻¹)` when `E = L`.
    pub fn twists(&self) -> Option<(MultChar, MultChar)> {
        match (&self.chi, self.same_torus()) {
            (TorusChar::Field(m), true) => {
                let th = self.datum.theta();
                Some((th.mul(&m.inverse()), th.mul(&m.conjugate().inverse())))
            }
            _ => None,
        }
    }

    /// The regime `c(θχ⁻¹) ≥ 2` and `c(θχ̄⁻¹) ≥ 2`, automatic when `E ≇ L`.
    pub fn star_regime(&self) -> bool {
        match self.twists() {
            Some((a, b)) => a.conductor() >= 2 && b.conductor() >= 2,
            None => true,
        }
    }

    fn require_star(&self) -> Result<()> {
        if self.star_regime() {
            Ok(())
        } else {
            Err(Error::StarViolated)
        }
    }

    /// `Nm(α_θ) − Nm(α_χ)` on imaginary parts.
    pub fn norm_gap(&self) -> Padic {
        self.datum.alpha().imaginary_part().norm() - self.chi.alpha_imag().norm()
    }

    /// `s` with `Tr(α_θ β) = Tr(α_χ √D_E)` for `β = s√D_L + l₁j`.
    pub fn alignment_coordinate(&self) -> Padic {
        let a = self.datum.alpha().b;
        let b = self.chi.alpha_imag().b;
        b * self.e().d() / (a * self.datum.l().d())
    }
}

/// `c(π) = −v(Nm α_θ)`, and the same value read off the case table.
pub fn conductor_pi(d: &CuspidalDatum) -> (i32, i32) {
    let n = d.n();
    let table = match d.case_index() {
        1 | 4 => 4 * n,
        2 | 5 => 4 * n + 2,
        _ => 2 * n + 1,
    };
    (d.c_pi(), table)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConductorRs {
    pub norm_route: i32,
    pub case_route: i32,
    pub l: i32,
}

/// `c(π × π_{χ⁻¹})` by `−2v(Nm α_θ − Nm α_χ)` and by the case formula with
/// scanned conductors.
pub fn conductor_rs(pb: &PeriodProblem) -> Result<ConductorRs> {
    pb.require_star()?;
    let gap = pb.norm_gap();
    if gap.is_zero() {
        return Err(Error::StarViolated);
    }
    let norm_route = -2 * gap.v();
    let c_pi = pb.datum.c_pi();
    let case_route = match pb.twists() {
        Some((a, b)) => {
            let l = pb.datum.l();
            dihedral_conductor(&l, a.conductor_scan()?) + dihedral_conductor(&l, b.conductor_scan()?)
        }
        None => 2 * c_pi.max(pb.chi.conductor_pi_scan()?),
    };
    Ok(ConductorRs { norm_route, case_route, l: norm_route - c_pi })
}

/// Normalised quadratic Gauss sum `λ = p^{−1/2} ∑_t (t/p) ψ(t/p)`.
pub fn langlands_lambda(ctx: &Ctx) -> Complex64 {
    let p = ctx.p();
    let g: Complex64 = (1..p)
        .map(|t| Complex64::from_polar(legendre(t, p) as f64, TAU * t as f64 / p as f64))
        .sum();
    g / (p as f64).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonReport {
    pub epsilon: i32,
    pub rule: &'static str,
    pub delta: Option<i64>,
}

fn residue_of(x: &Padic) -> i64 {
    if x.v() > 0 {
        0
    } else {
        x.residue()
    }
}

/// `ε(π_E × χ⁻¹)` from the table for trivial central character.
pub fn tunnell_epsilon(pb: &PeriodProblem) -> Result<EpsilonReport> {
    let d = &pb.datum;
    if d.theta().central_values()?.iter().any(|p| !p.is_zero()) {
        return Err(Error::OutOfTableRange);
    }
    let e = pb.e();
    let l = d.l();
    let p = l.ctx().p();
    let rep = |epsilon, rule, delta| Ok(EpsilonReport { epsilon, rule, delta });
    if e.kind() == Kind::Split {
        return rep(1, "split torus", None);
    }
    if pb.chi.conductor_pi() > d.c_pi() {
        return rep(1, "c(pi_chi) > c(pi)", None);
    }
    match (l.kind(), e.kind()) {
        (Kind::Inert, Kind::Inert) => {
            let (a, b) = pb.twists().unwrap();
            let s = if (a.conductor() + b.conductor()) % 2 == 0 { 1 } else { -1 };
            rep(s, "inert/inert parity", None)
        }
        (Kind::Inert, Kind::Ramified) | (Kind::Ramified, Kind::Inert) => rep(-1, "inert/ramified", None),
        _ if !pb.same_torus() => {
            let xi = residue_of(&(e.d() / l.d()));
            let delta = residue_of(&pb.alignment_coordinate());
            let t = (delta * delta % p * crate::padic::mod_inverse(xi as i128, p as i128) as i64 - 1).rem_euclid(p);
            let eps = if t != 0 && legendre(t, p) == 1 { -1 } else { 1 };
            rep(eps, "distinct ramified", Some(delta))
        }
        _ => {
            pb.require_star()?;
            let (m1, m2) = pb.twists().unwrap();
            let (c1, c2, c) = (m1.conductor(), m2.conductor(), d.c_theta());
            let a_th = d.alpha().b;
            let b_chi = pb.chi.alpha_imag().b;
            let dd = l.d();
            if c1 == c && c2 == c {
                let delta = residue_of(&(b_chi / a_th));
                let t = (delta * delta - 1).rem_euclid(p);
                let eps = if legendre(t, p) == -1 { -1 } else { 1 };
                rep(eps, "same ramified, full conductors", Some(delta))
            } else {
                let (cm, am, sign) = if c1 < c { (c1, a_th - b_chi, -2) } else { (c2, -(a_th + b_chi), 2) };
                let delta = residue_of(&(am * dd.powi((cm / 2) as i64) / (a_th * dd.powi((c / 2) as i64))));
                let par = if ((cm + c) / 2) % 2 == 0 { 1 } else { -1 };
                let eps = if legendre(sign * delta * par, p) == -1 { -1 } else { 1 };
                rep(eps, "same ramified, lowered twist", Some(delta))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Existence {
    pub matrix: bool,
    pub division: bool,
    pub symbol_side: Side,
}

/// Whether an embedding with `α_θ ∈ ι(α_χ) + ι(E)^⊥` exists in `B_side`.
pub fn geometric_existence(pb: &PeriodProblem, side: Side) -> Result<bool> {
    pb.require_star()?;
    let e = pb.e();
    if e.kind() == Kind::Split {
        return Ok(side == Side::Matrix);
    }
    let b = QuatAlgebra::on_side(pb.datum.l(), side)?;
    match b.embed_with_coordinate(&e, pb.alignment_coordinate()) {
        Ok(_) => Ok(true),
        Err(Error::NoSolution) => Ok(false),
        Err(err) => Err(err),
    }
}

/// The side predicted by the symbol `(−(Nm α_θ − Nm α_χ), D_E)`.
pub fn existence_symbol(pb: &PeriodProblem) -> Result<Side> {
    pb.require_star()?;
    if pb.e().kind() == Kind::Split {
        return Ok(Side::Matrix);
    }
    let s = hilbert_symbol(&(-pb.norm_gap()), &pb.e().d())?;
    Ok(if s == 1 { Side::Matrix } else { Side::Division })
}

pub fn existence(pb: &PeriodProblem) -> Result<Existence> {
    Ok(Existence {
        matrix: geometric_existence(pb, Side::Matrix)?,
        division: geometric_existence(pb, Side::Division)?,
        symbol_side: existence_symbol(pb)?,
    })
}

/// An aligned embedding together with the valuation identities it satisfies.
#[derive(Clone, Copy, Debug)]
pub struct Aligned {
    pub emb: TorusEmbedding,
    pub v_gap: i32,
    pub v_perp_minus_v_beta: i32,
}

pub fn align_torus(pb: &PeriodProblem) -> Result<Aligned> {
    pb.require_star()?;
    let b = pb.datum.b();
    let e = pb.e();
    let s = pb.alignment_coordinate();
    let emb = b.embed_with_coordinate(&e, s)?;
    let beta_perp = emb.beta.orthogonal_decompose().1;
    Ok(Aligned {
        emb,
        v_gap: pb.norm_gap().v(),
        v_perp_minus_v_beta: beta_perp.norm().v() - emb.beta.norm().v(),
    })
}

/// Whether `t` lies in `F^×U_E(1)`.
pub fn in_lie_range(t: &QuadElem) -> bool {
    match t.alg().kind() {
        Kind::Inert => t.b.v() > t.a.v(),
        Kind::Ramified => t.b.v() >= t.a.v(),
        Kind::Split => {
            let (x, y) = t.to_pair();
            !x.is_zero() && !y.is_zero() && (y / x - t.a.ctx().one()).v() >= 1
        }
    }
}

/// One pass of `∑ w·Φ(ι(t))·χ⁻¹(t)` over coset representatives.
#[derive(Clone, Debug)]
pub struct TorusSum {
    pub value: Complex64,
    pub all_phases_zero: bool,
    pub support: Rational64,
    pub cells: usize,
    pub lie_range_support: bool,
}

pub fn torus_sum<F>(e: &QuadAlgebra, chi: &TorusChar, depth: u32, phi: F) -> Result<TorusSum>
where
    F: Fn(&QuadElem) -> Result<Coefficient>,
{
    let reps = e.coset_reps(depth)?;
    let mut out = TorusSum {
        value: Complex64::zero(),
        all_phases_zero: true,
        support: Rational64::zero(),
        cells: reps.len(),
        lie_range_support: true,
    };
    for (t, w) in &reps {
        let ph = match phi(t)? {
            Coefficient::Zero => continue,
            Coefficient::Unresolved => return Err(Error::NotApplicable("torus meets J outside ZJ¹")),
            Coefficient::Value(ph) => ph - chi.eval(t)?,
        };
        out.all_phases_zero &= ph.is_zero();
        out.support += *w;
        out.lie_range_support &= in_lie_range(t);
        out.value += ph.to_complex() * crate::phase::rational_to_f64(*w);
    }
    Ok(out)
}

/// Largest number of representatives a single pass may enumerate.
pub const MAX_CELLS: usize = 160_000;

/// Repeats [`torus_sum`] at increasing depth until two consecutive values
/// agree to `1e−10`.
pub fn stable_torus_sum<F>(e: &QuadAlgebra, chi: &TorusChar, start: u32, phi: F) -> Result<(TorusSum, u32)>
where
    F: Fn(&QuadElem) -> Result<Coefficient>,
{
    let cells = |m: u32| e.coset_reps(m).map(|r| r.len()).unwrap_or(usize::MAX);
    let mut m = start.max(1);
    let mut prev = torus_sum(e, chi, m, &phi)?;
    loop {
        if cells(m + 1) > MAX_CELLS {
            return Err(Error::DepthUnstable);
        }
        let next = torus_sum(e, chi, m + 1, &phi)?;
        if (next.value - prev.value).norm() <= 1e-10 && next.support == prev.support {
            return Ok((next, m + 1));
        }
        prev = next;
        m += 1;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub route: &'static str,
    pub case: u8,
    pub l: Option<i32>,
    #[serde(serialize_with = "ser_rationals")]
    pub predicted: Vec<Rational64>,
    #[serde(serialize_with = "ser_complex")]
    pub brute: Complex64,
    pub depth: u32,
    pub cells: usize,
    pub all_phases_zero: bool,
    #[serde(serialize_with = "ser_rational")]
    pub support_measure: Rational64,
    pub lie_range_support: bool,
    pub matches: bool,
    pub tolerance: f64,
}

pub const TOLERANCE: f64 = 1e-8;

impl IntegralReport {
    pub fn from_sum(route: &'static str, pb: &PeriodProblem, l: Option<i32>, predicted: Vec<Rational64>, s: TorusSum, depth: u32) -> IntegralReport {
        let nonzero = s.value.norm() > TOLERANCE;
        let exact = s.all_phases_zero && (s.value - Complex64::new(crate::phase::rational_to_f64(s.support), 0.0)).norm() < TOLERANCE;
        let matches = if nonzero {
            exact && predicted.contains(&s.support)
        } else {
            predicted.iter().any(|r| r.is_zero())
        };
        IntegralReport {
            route,
            case: pb.datum.case_index(),
            l,
            predicted,
            brute: s.value,
            depth,
            cells: s.cells,
            all_phases_zero: s.all_phases_zero,
            support_measure: s.support,
            lie_range_support: s.lie_range_support,
            matches,
            tolerance: TOLERANCE,
        }
    }

    pub fn is_nonzero(&self) -> bool {
        self.brute.norm() > self.tolerance
    }
}

/// `L(η_E, 1) q^{−k}` with `k = ⌈i′/e_L − (e_E − 1 + (c(π) − l)/2)/2⌉`, floored at `2 − e_E`;
/// when `dim Λ = q` the value with `i` in place of `i′` is included.
pub fn size_formula(d: &CuspidalDatum, e: &QuadAlgebra, l: i32) -> Vec<Rational64> {
    let e_l = d.l().e();
    let e_e = e.e();
    let c_pi = d.c_pi();
    let exponent = |lvl2: i32| -> u32 {
        // ⌈lvl2/(2e_L) − (2(e_E − 1) + c(π) − l)/4⌉ over the common denominator 4e_L
        let num = 2 * lvl2 - e_l * (2 * (e_e - 1) + c_pi - l);
        let k = num.div_euclid(4 * e_l) + (num.rem_euclid(4 * e_l) != 0) as i32;
        k.max(2 - e_e) as u32
    };
    let mut out = vec![e.filtration_volume(exponent(d.i2p()))];
    if d.dim_lambda() > 1 {
        let alt = e.filtration_volume(exponent(d.i2()));
        if alt != out[0] {
            out.push(alt);
        }
    }
    out
}

/// The prediction set for the period integral on the datum's side.
pub fn predicted_integral(pb: &PeriodProblem) -> Result<Vec<Rational64>> {
    if let Some(w) = whole_torus_prediction(pb)? {
        return Ok(vec![w]);
    }
    if !geometric_existence(pb, pb.datum.side())? {
        return Err(Error::ExistenceFails);
    }
    let rs = conductor_rs(pb)?;
    Ok(size_formula(&pb.datum, &pb.e(), rs.l))
}

fn whole_torus_applies(pb: &PeriodProblem) -> bool {
    pb.same_torus() && !pb.star_regime()
}

fn is_trivial(m: &MultChar) -> bool {
    m.conductor() == 0 && m.tame_exp() == 0 && m.unif_phase().is_zero()
}

/// Characters `μ` of `L^×` with `c(μ) = 1`, `μ|_F = 1`, `μ ≠ 1`.
fn level_one_twists(d: &CuspidalDatum) -> Vec<MultChar> {
    let q = d.ctx().q();
    (1..=q).map(|k| d.theta().with(None, k * (q - 1), Phase::zero())).collect()
}

/// The constituents `θ_B` (when `dim Λ = 1`) or `θμ` (when `dim Λ = q`) of `Λ|_{L^×}`.
fn torus_constituents(d: &CuspidalDatum) -> Vec<MultChar> {
    if d.dim_lambda() == 1 {
        vec![d.theta_b().clone()]
    } else {
        level_one_twists(d).iter().map(|m| d.theta().mul(m)).collect()
    }
}

fn whole_torus_prediction(pb: &PeriodProblem) -> Result<Option<Rational64>> {
    if !whole_torus_applies(pb) {
        return Ok(None);
    }
    let TorusChar::Field(chi) = &pb.chi else { return Ok(None) };
    let hit = torus_constituents(&pb.datum)
        .iter()
        .any(|th| is_trivial(&th.mul(&chi.inverse())) || is_trivial(&th.conjugate().mul(&chi.inverse())));
    Ok(Some(if hit { pb.e().total_volume() } else { Rational64::zero() }))
}

/// Period integral when `E ≅ L` and one twist has conductor at most one: the
/// integrand is a character of the whole torus.
pub fn whole_torus_case(pb: &PeriodProblem) -> Result<IntegralReport> {
    let Some(pred) = whole_torus_prediction(pb)? else {
        return Err(Error::NotApplicable("whole-torus case needs E = L and a twist of conductor <= 1"));
    };
    let e = pb.e();
    let depth = (pb.datum.c_theta().max(pb.chi.conductor()) as u32).max(2);
    let mut best: Option<TorusSum> = None;
    for th in torus_constituents(&pb.datum) {
        for conj in [false, true] {
            let th = if conj { th.conjugate() } else { th.clone() };
            let s = torus_sum(&e, &pb.chi, depth, |t| Ok(Coefficient::Value(th.eval(t)?)))?;
            if best.as_ref().map_or(true, |b| s.value.norm() > b.value.norm() + 1e-12) {
                best = Some(s);
            }
        }
    }
    Ok(IntegralReport::from_sum("whole-torus", pb, None, vec![pred], best.unwrap(), depth))
}

/// Depth at which the brute-force sums start.
pub fn start_depth(pb: &PeriodProblem) -> u32 {
    let e_e = pb.e().e();
    let c = pb.datum.c_theta().max(pb.chi.conductor());
    (((c + e_e - 1) / e_e) as u32).max(2)
}

/// A strategy for evaluating the period integral of a minimal vector.
pub trait PeriodRoute: Named + Send + Sync {
    fn integral(&self, pb: &PeriodProblem) -> Result<IntegralReport>;
}

/// Keeps `L` and `α_θ` fixed and embeds `E` through `β = s√D_L + l₁j`.
pub struct LPairAlign;

impl Named for LPairAlign {
    fn name(&self) -> &'static str {
        "lpair-align"
    }
}

impl PeriodRoute for LPairAlign {
    fn integral(&self, pb: &PeriodProblem) -> Result<IntegralReport> {
        if whole_torus_applies(pb) {
            return whole_torus_case(pb);
        }
        let d = &pb.datum;
        let rs = conductor_rs(pb)?;
        let (s, depth, predicted) = match align_torus(pb) {
            Ok(a) => {
                let (s, depth) = stable_torus_sum(&pb.e(), &pb.chi, start_depth(pb), |t| d.matrix_coefficient(&a.emb.image(t)))?;
                (s, depth, size_formula(d, &pb.e(), rs.l))
            }
            Err(Error::NoSolution) => {
                let (s, depth) = unaligned_sum(pb)?;
                (s, depth, vec![Rational64::zero()])
            }
            Err(e) => return Err(e),
        };
        Ok(IntegralReport::from_sum(self.name(), pb, Some(rs.l), predicted, s, depth))
    }
}

/// Brute-force sum through the first unaligned embedding `β = s√D_L + l₁j`
/// whose image avoids `J ∖ ZJ¹`.
fn unaligned_sum(pb: &PeriodProblem) -> Result<(TorusSum, u32)> {
    let d = &pb.datum;
    let b = d.b();
    let e = pb.e();
    let c = e.ctx();
    let mut last = Error::NoEmbedding;
    for k in [0, 1, -1, 2] {
        for r in 0..c.p() {
            let Ok(emb) = b.embed_with_coordinate(&e, c.int(r) * c.pi_pow(k)) else { continue };
            match stable_torus_sum(&e, &pb.chi, start_depth(pb), |t| d.matrix_coefficient(&emb.image(t))) {
                Ok(out) => return Ok(out),
                Err(err) => last = err,
            }
        }
    }
    Err(last)
}

pub fn period_routes() -> Registry<dyn PeriodRoute> {
    let mut r: Registry<dyn PeriodRoute> = Registry::new();
    r.register(Box::new(LPairAlign)).register(Box::new(crate::appendix::AppendixTwoByTwo));
    r
}
