//! Worked values, each checked against an oracle computed here by other means.

use num_rational::Rational64;
use num_traits::{One, Zero};
use waldspurger::cuspidal::{build_datum, Coefficient};
use waldspurger::orbital::{archimedean_orbital, archimedean_orbital_exact};
use waldspurger::padic::{hilbert_symbol, legendre, teichmuller, Ctx, Padic};
use waldspurger::phase::{psi, psi_k, MultChar, Phase};
use waldspurger::quad::{Kind, QuadAlgebra};
use waldspurger::quaternion::{QuatAlgebra, Side};
use waldspurger::registry::polarizations;
use waldspurger::suite::{datum_for_case, sample_theta, torus_char};
use waldspurger::waldspurger::{
    conductor_rs, existence, geometric_existence, langlands_lambda, period_routes, predicted_integral,
    tunnell_epsilon, PeriodProblem, TorusChar,
};
use waldspurger::Error;

fn ctx(p: i64, n: u32) -> Ctx {
    Ctx::new(p, n).unwrap()
}

fn modp(x: i128, m: i128) -> i128 {
    x.rem_euclid(m)
}

fn inverse_by_search(a: i128, m: i128) -> i128 {
    (1..m).find(|k| modp(a * k, m) == 1).unwrap()
}

#[test]
fn half_mod_125() {
    let c = ctx(5, 3);
    let h = c.rational(1, 2);
    assert_eq!(h.v(), 0);
    assert_eq!(h.mod_pk(3).unwrap(), inverse_by_search(2, 125));
    assert_eq!(h.mod_pk(3).unwrap(), 63);
}

#[test]
fn carries_and_cancellation() {
    let c = ctx(5, 3);
    let s = c.int(2) + c.int(3);
    assert_eq!((s.v(), s.unit() % 5), (1, 1));
    let x = c.int(7);
    assert!((x - x).is_zero());
}

#[test]
fn squares_match_residue_scan() {
    let c = ctx(5, 8);
    let residues: Vec<i64> = (1..5).map(|r| r * r % 5).collect();
    for a in 1..5i64 {
        assert_eq!(c.int(a).is_square().unwrap(), residues.contains(&a));
    }
    assert!(!c.int(5).is_square().unwrap());
    assert!(c.int(4).is_square().unwrap());
}

/// Whether `z² = a x² + b y²` has a primitive solution modulo `p^k`.
fn hilbert_by_search(a: i64, b: i64, p: i64, k: u32) -> i32 {
    let m = p.pow(k);
    for x in 0..m {
        for y in 0..m {
            let rhs = (a * x % m * x + b * y % m * y) % m;
            for z in 0..m {
                if (x % p != 0 || y % p != 0 || z % p != 0) && (z * z - rhs).rem_euclid(m) == 0 {
                    return 1;
                }
            }
        }
    }
    -1
}

#[test]
fn hilbert_symbol_against_solvability_search() {
    let c = ctx(5, 8);
    assert_eq!(hilbert_symbol(&c.int(2), &c.int(5)).unwrap(), -1);
    assert_eq!(hilbert_symbol(&c.int(5), &c.int(5)).unwrap(), 1);
    for a in [1, 2, 3, 5, 10] {
        for b in [1, 2, 5, 15] {
            let want = hilbert_by_search(a, b, 5, 3);
            assert_eq!(hilbert_symbol(&c.int(a), &c.int(b)).unwrap(), want, "({a}, {b})");
        }
    }
}

#[test]
fn teichmuller_by_root_search() {
    let c = ctx(5, 3);
    let root = (0..125i128).find(|x| x % 5 == 2 && modp(x.pow(4), 125) == 1).unwrap();
    assert_eq!(teichmuller(&c, 2).unwrap().mod_pk(3).unwrap(), root);
    assert_eq!(root, 57);
    assert_eq!(teichmuller(&c, 1).unwrap().mod_pk(3).unwrap(), 1);
    let w4 = teichmuller(&c, 4).unwrap();
    assert_eq!(w4 * w4, c.one());
    assert_eq!(w4.residue(), 4);
}

#[test]
fn plog_six_by_series() {
    let c = ctx(5, 3);
    let mut sum = Rational64::zero();
    let mut pw = Rational64::one();
    for k in 1..=12i64 {
        pw *= Rational64::from_integer(5);
        let term = pw / Rational64::from_integer(k);
        sum += if k % 2 == 1 { term } else { -term };
    }
    let want = modp(*sum.numer() as i128 * inverse_by_search(modp(*sum.denom() as i128, 125), 125), 125);
    let got = c.int(6).plog().unwrap();
    assert_eq!(got.v(), 1);
    assert_eq!(got.mod_pk(3).unwrap(), want);
    assert_eq!(want, 55);
    assert!(c.one().plog().unwrap().is_zero());
}

#[test]
fn quadratic_arithmetic() {
    let c = ctx(5, 8);
    let l = QuadAlgebra::inert(&c);
    assert_eq!(l.d(), c.int(2));
    let x = l.ints(1, 1);
    assert_eq!(x.norm(), c.int(-1));
    assert_eq!(x.conj().conj(), x);
    let y = l.ints(3, 4);
    assert_eq!(y.imaginary_part(), l.ints(0, 4));
    assert!(l.ints(0, 1).is_minimal_element().unwrap());
    assert!(!l.ints(1, 5).is_minimal_element().unwrap());
    assert!(l.ints(5, 1).is_minimal_element().unwrap());
    assert_eq!(l.from_base(c.int(3)).norm_one_map().unwrap(), l.one());
    assert_eq!(l.sqrt_d().norm_one_map().unwrap(), -l.one());
    let s = QuadAlgebra::split(&c);
    let prod = s.from_pair(c.int(1), c.int(2)).unwrap() * s.from_pair(c.int(3), c.int(4)).unwrap();
    assert_eq!(prod.to_pair(), (c.int(3), c.int(8)));
}

/// `q^{M−1}(q+1)`, `2q^M` and `q^{M−1}(q−1)` classes with volumes 1, 2 and 1.
#[test]
fn filtration_volumes_by_counting() {
    let c = ctx(5, 8);
    let inert = QuadAlgebra::inert(&c);
    let ram = QuadAlgebra::ramified(&c, 1);
    assert_eq!(inert.filtration_volume(1), Rational64::new(1, 6));
    assert_eq!(inert.filtration_volume(2), Rational64::new(1, 30));
    assert_eq!(ram.filtration_volume(2), Rational64::new(1, 25));
    let reps = inert.coset_reps(2).unwrap();
    assert_eq!(reps.len(), 30);
    assert!(reps.iter().all(|(_, w)| *w == Rational64::new(1, 30)));
    assert_eq!(inert.coset_reps(1).unwrap().len(), 6);
    for (alg, count, vol) in [(inert, 6 * 25, 1), (ram, 2 * 125, 2), (QuadAlgebra::split(&c), 4 * 25, 1)] {
        let reps = alg.coset_reps(3).unwrap();
        assert_eq!(reps.len(), count);
        let total: Rational64 = reps.iter().map(|(_, w)| *w).sum();
        assert_eq!(total, Rational64::from_integer(vol));
        assert_eq!(alg.filtration_volume(3) * Rational64::from_integer(count as i64), total);
    }
}

#[test]
fn additive_characters() {
    let c = ctx(5, 8);
    assert!(psi(&c.one()).unwrap().is_zero());
    assert_eq!(psi(&c.rational(1, 5)).unwrap(), Phase::frac(1, 5));
    assert_eq!(psi(&c.rational(7, 25)).unwrap(), Phase::frac(7, 25));
    let l = QuadAlgebra::inert(&c);
    assert!(psi_k(&l.ints(0, 3)).unwrap().is_zero());
    for a in 1..5 {
        let x = l.from_base(c.rational(a, 5));
        assert_eq!(psi_k(&x).unwrap(), Phase::frac(2 * a, 5));
    }
    assert_eq!(l.c_psi(), 0);
    assert_eq!(QuadAlgebra::ramified(&c, 1).c_psi(), -1);
}

#[test]
fn character_conductors() {
    let c = ctx(5, 8);
    let l = QuadAlgebra::inert(&c);
    assert_eq!(MultChar::trivial(l).unwrap().conductor(), 0);
    let wild = MultChar::new(l, Some(l.elem(c.zero(), c.pi_pow(-2))), 0, Phase::zero()).unwrap();
    assert_eq!(wild.conductor(), 2);
    assert_eq!(wild.conductor_scan().unwrap(), 2);
    let tame = MultChar::new(l, None, 1, Phase::zero()).unwrap();
    assert_eq!(tame.conductor(), 1);
}

/// `α_θ = ϖ^{−2}/√D`, so `Tr(α_θ ϖ√D) = 2/5` and the higher log terms are integral.
#[test]
fn simple_character_value() {
    let c = ctx(5, 10);
    let l = QuadAlgebra::inert(&c);
    let alpha = l.elem(c.zero(), c.pi_pow(-2) / l.d());
    let th = MultChar::new(l, Some(alpha), 0, Phase::zero()).unwrap();
    let x = l.one() + l.uniformizer() * l.sqrt_d();
    assert_eq!(th.eval(&x).unwrap(), Phase::frac(2, 5));
    let d = build_datum(&th, Side::Matrix, polarizations().get("default").unwrap()).unwrap();
    let b = d.b();
    match d.matrix_coefficient(&b.from_l(x)).unwrap() {
        Coefficient::Value(ph) => assert_eq!(ph, Phase::frac(2, 5)),
        other => panic!("{other:?}"),
    }
    match d.matrix_coefficient(&b.one()).unwrap() {
        Coefficient::Value(ph) => assert!(ph.is_zero()),
        other => panic!("{other:?}"),
    }
    let g = b.one() + b.j().scale(c.int(5));
    assert!(d.zb1_membership(&g).is_some());
    match d.matrix_coefficient(&g).unwrap() {
        Coefficient::Value(ph) => assert!(ph.is_zero()),
        other => panic!("{other:?}"),
    }
    assert!(d.zb1_membership(&b.from_base(c.int(3))).is_some());
}

#[test]
fn case_table() {
    let c = ctx(5, 16);
    let dat = |kind, cth, side| build_datum(&sample_theta(&c, kind, cth, 1).unwrap(), side, polarizations().get("default").unwrap()).unwrap();
    let d = dat(Kind::Inert, 2, Side::Matrix);
    assert_eq!((d.case_index(), d.i2(), d.i2p(), d.dim_lambda(), d.c_pi()), (1, 2, 2, 1, 4));
    let d = dat(Kind::Inert, 3, Side::Matrix);
    assert_eq!((d.case_index(), d.i2(), d.i2p(), d.dim_lambda(), d.c_pi()), (2, 2, 4, 5, 6));
    let d = dat(Kind::Inert, 3, Side::Division);
    assert_eq!((d.case_index(), d.i2(), d.i2p(), d.dim_lambda()), (5, 3, 3, 1));
    let d = dat(Kind::Ramified, 2, Side::Matrix);
    assert_eq!((d.case_index(), d.c_pi()), (3, 3));
    let th = sample_theta(&c, Kind::Inert, 1, 1).unwrap();
    assert!(matches!(build_datum(&th, Side::Matrix, polarizations().get("default").unwrap()), Err(Error::ConductorTooSmall)));
}

/// `1/((1 − q⁻¹)q^{2n})` and `2/((1 − q⁻²)q^{n+1})` at `q = 5`, `n = 1`.
#[test]
fn formal_degrees() {
    let c = ctx(5, 16);
    let q = Rational64::from_integer(5);
    let one = Rational64::one();
    let case1 = one / ((one - one / q) * q * q);
    let case3 = Rational64::from_integer(2) / ((one - one / (q * q)) * q * q);
    assert_eq!(case1, Rational64::new(1, 20));
    assert_eq!(case3, Rational64::new(1, 12));
    for (case, want) in [(1, case1), (3, case3)] {
        let d = datum_for_case(&c, case, 1, 1, "default").unwrap();
        let f = d.formal_degree().unwrap();
        assert_eq!(f.measured, want);
        assert_eq!(d.formal_degree_closed_form(), want);
    }
}

fn problem(c: &Ctx, case: u8, e: QuadAlgebra, cchi: i32, x: i64) -> PeriodProblem {
    let d = datum_for_case(c, case, 1, 1, "default").unwrap();
    PeriodProblem::new(d, torus_char(&e, cchi, x, Phase::zero()).unwrap()).unwrap()
}

#[test]
fn reference_integral_and_conductor() {
    let c = ctx(5, 16);
    let pb = problem(&c, 1, QuadAlgebra::inert(&c), 0, 1);
    let rs = conductor_rs(&pb).unwrap();
    assert_eq!((rs.norm_route, rs.l), (8, 4));
    assert_eq!(predicted_integral(&pb).unwrap(), vec![Rational64::new(1, 6)]);
    let r = period_routes().get("lpair-align").unwrap().integral(&pb).unwrap();
    assert!((r.brute.re - 1.0 / 6.0).abs() < 1e-9 && r.brute.im.abs() < 1e-9);
    assert!(r.all_phases_zero && r.matches);
    assert_eq!(r.support_measure, Rational64::new(1, 6));

    let pb = problem(&c, 1, QuadAlgebra::inert(&c), 2, 2);
    let rs = conductor_rs(&pb).unwrap();
    assert_eq!((rs.norm_route, rs.case_route, rs.l), (8, 8, 4));
}

#[test]
fn whole_torus_value() {
    let c = ctx(5, 16);
    let d = datum_for_case(&c, 1, 1, 1, "default").unwrap();
    let pb = PeriodProblem::new(d.clone(), TorusChar::Field(d.theta().clone())).unwrap();
    let r = period_routes().get("lpair-align").unwrap().integral(&pb).unwrap();
    assert!((r.brute.re - 1.0).abs() < 1e-9);
    assert_eq!(r.predicted, vec![Rational64::one()]);
}

#[test]
fn epsilon_inert_against_ramified() {
    let c = ctx(5, 16);
    for e in [QuadAlgebra::ramified(&c, 1), QuadAlgebra::ramified(&c, 2)] {
        for (cchi, x) in [(0, 1), (2, 1), (2, 3), (2, 4)] {
            let pb = problem(&c, 1, e, cchi, x);
            assert!(pb.chi().conductor_pi() <= pb.datum().c_pi());
            if pb.star_regime() {
                assert_eq!(tunnell_epsilon(&pb).unwrap().epsilon, -1);
                assert!(!existence(&pb).unwrap().matrix);
            }
        }
    }
}

#[test]
fn split_torus_sides() {
    let c = ctx(5, 16);
    let pb = problem(&c, 1, QuadAlgebra::split(&c), 0, 1);
    assert!(geometric_existence(&pb, Side::Matrix).unwrap());
    assert!(!geometric_existence(&pb, Side::Division).unwrap());
    let b = QuatAlgebra::on_side(QuadAlgebra::inert(&c), Side::Division).unwrap();
    assert!(matches!(b.embed_second_torus(&QuadAlgebra::split(&c)), Err(Error::NoEmbedding)));
}

#[test]
fn ramified_torus_in_inert_pair_model() {
    let c = ctx(5, 16);
    let b = QuatAlgebra::on_side(QuadAlgebra::inert(&c), Side::Matrix).unwrap();
    let e = QuadAlgebra::ramified(&c, 1);
    let emb = b.embed_second_torus(&e).unwrap();
    assert_eq!(emb.beta * emb.beta, b.from_base(e.d()));
    assert!(emb.beta.trace().is_zero());
    let g = b.elem(QuadAlgebra::inert(&c).ints(3, 1), QuadAlgebra::inert(&c).ints(1, 2));
    let m = b.matrix_model(&g).unwrap();
    assert_eq!(m.det(), g.norm());
    assert_eq!(b.from_matrix(&m).unwrap(), g);
}

#[test]
fn case_three_prediction() {
    let c = ctx(5, 16);
    let mut seen = false;
    for n in [1, 2] {
        let d = datum_for_case(&c, 3, n, 1, "default").unwrap();
        let l = d.l();
        for x in 1..5 {
            for cchi in [0, 2, 4, 6] {
                let Ok(pb) = PeriodProblem::new(d.clone(), torus_char(&l, cchi, x, Phase::zero()).unwrap()) else { continue };
                let Ok(rs) = conductor_rs(&pb) else { continue };
                match predicted_integral(&pb) {
                    Ok(v) if rs.l == 5 => {
                        assert_eq!(v, vec![Rational64::new(1, 5)]);
                        seen = true;
                    }
                    Err(Error::ExistenceFails) => assert!(!existence(&pb).unwrap().matrix),
                    _ => {}
                }
            }
        }
    }
    assert!(seen, "no case-3 instance with l = 5");
}

#[test]
fn langlands_lambda_square() {
    for p in [5, 7, 11, 13] {
        let l = langlands_lambda(&ctx(p, 8));
        let sq = l * l;
        assert!((sq.re - legendre(-1, p) as f64).abs() < 1e-12 && sq.im.abs() < 1e-12, "p = {p}");
    }
}

#[test]
fn archimedean_values() {
    assert_eq!(archimedean_orbital_exact(2, 1, Rational64::from_integer(-1)).unwrap(), Rational64::new(1, 2));
    assert_eq!(archimedean_orbital_exact(3, 1, Rational64::from_integer(-1)).unwrap(), Rational64::one());
    for k in 2..7 {
        for m in 1..k {
            for xi in [-0.5, -1.0, -4.0] {
                let a = archimedean_orbital(k, m, xi).unwrap();
                let b = archimedean_orbital(k, -m, xi).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
    assert!(matches!(archimedean_orbital(2, 2, -1.0), Err(Error::WeightViolation)));
    assert!(matches!(archimedean_orbital(3, 1, 0.5), Err(Error::DomainViolation)));
}

#[test]
fn padic_precision_guard() {
    let c = ctx(5, 3);
    let x: Padic = c.int(5);
    assert!(x.checked_inv().is_ok());
    assert!(matches!(c.zero().checked_inv(), Err(_)));
}
