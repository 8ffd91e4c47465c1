use num_rational::Rational64;
use proptest::prelude::*;
use waldspurger::cuspidal::Coefficient;
use waldspurger::orbital::{archimedean_orbital, archimedean_orbital_exact};
use waldspurger::padic::{hilbert_symbol, teichmuller, Ctx};
use waldspurger::phase::{MultChar, Phase};
use waldspurger::quad::{Kind, QuadAlgebra, QuadElem};
use waldspurger::quaternion::{QuatAlgebra, QuatElem, Side};
use waldspurger::suite::{datum_for_case, torus_char};
use waldspurger::waldspurger::{conductor_rs, period_routes, PeriodProblem};

const PRIMES: [i64; 3] = [5, 7, 11];

fn ctx(p: i64) -> Ctx {
    Ctx::new(p, 12).unwrap()
}

fn algebra(c: &Ctx, k: u8) -> QuadAlgebra {
    match k % 4 {
        0 => QuadAlgebra::inert(c),
        1 => QuadAlgebra::ramified(c, 1),
        2 => QuadAlgebra::ramified(c, c.nonsquare()),
        _ => QuadAlgebra::split(c),
    }
}

fn unit(c: &Ctx, n: i64) -> i64 {
    let p = c.p();
    let r = n.rem_euclid(p * p * p);
    if r % p == 0 {
        r + 1
    } else {
        r
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_inverts_log(pi in 0usize..3, t in 0i64..100_000) {
        let c = ctx(PRIMES[pi]);
        let x = c.one() + c.int(c.p()) * c.int(t);
        prop_assert_eq!(x.plog().unwrap().pexp().unwrap(), x);
    }

    #[test]
    fn hilbert_bilinear(pi in 0usize..3, a in 1i64..500, b in 1i64..500, d in 1i64..500, ka in 0i32..2, kb in 0i32..2, kd in 0i32..2) {
        let c = ctx(PRIMES[pi]);
        let a = c.int(unit(&c, a)) * c.pi_pow(ka);
        let b = c.int(unit(&c, b)) * c.pi_pow(kb);
        let d = c.int(unit(&c, d)) * c.pi_pow(kd);
        let h = |x, y| hilbert_symbol(&x, &y).unwrap();
        prop_assert_eq!(h(a, b * d), h(a, b) * h(a, d));
        prop_assert_eq!(h(a, -a), 1);
        prop_assert_eq!(h(a, b), h(b, a));
    }

    #[test]
    fn squares_have_trivial_symbols(pi in 0usize..3, a in 1i64..500, k in 0i32..3) {
        let c = ctx(PRIMES[pi]);
        let x = c.int(unit(&c, a)) * c.pi_pow(2 * k);
        let all_trivial = [c.one(), c.int(c.nonsquare()), c.int(c.p()), c.int(c.p() * c.nonsquare())]
            .iter()
            .all(|n| hilbert_symbol(&x, n).unwrap() == 1);
        prop_assert_eq!(x.is_square().unwrap(), all_trivial);
    }

    #[test]
    fn teichmuller_roots_of_unity(pi in 0usize..3, r in 1i64..11) {
        let c = ctx(PRIMES[pi]);
        let r = 1 + r % (c.p() - 1);
        let w = teichmuller(&c, r).unwrap();
        prop_assert_eq!(w.pow((c.p() - 1) as u64), c.one());
        prop_assert_eq!(w.residue(), r);
    }

    #[test]
    fn norms_of_distinct_algebras_separate(pi in 0usize..3, ke in 0u8..3, kl in 0u8..3, a in 1i64..200, b in 1i64..200, va in -2i32..3, vb in -2i32..3) {
        let c = ctx(PRIMES[pi]);
        let (e, l) = (algebra(&c, ke), algebra(&c, kl));
        prop_assume!(!e.isomorphic(&l));
        let x = e.elem(c.zero(), c.int(unit(&c, a)) * c.pi_pow(va));
        let y = l.elem(c.zero(), c.int(unit(&c, b)) * c.pi_pow(vb));
        let (nx, ny) = (x.norm(), y.norm());
        prop_assert_eq!((nx - ny).v(), nx.v().min(ny.v()));
    }

    #[test]
    fn minimal_elements_split_valuations(pi in 0usize..3, k in 0u8..3, a in 0i64..500, b in 1i64..500, va in -2i32..3, vb in -2i32..3, vx in -1i32..2) {
        let c = ctx(PRIMES[pi]);
        let e = algebra(&c, k);
        let x = e.elem(c.zero(), c.pi_pow(vx));
        let fa = if a == 0 { c.zero() } else { c.int(unit(&c, a)) * c.pi_pow(va) };
        let fb = c.int(unit(&c, b)) * c.pi_pow(vb);
        let sum = e.from_base(fa) + x.scale(fb);
        let want = if fa.is_zero() { x.scale(fb).v() } else { e.from_base(fa).v().min(x.scale(fb).v()) };
        prop_assert_eq!(sum.v(), want);
    }

    #[test]
    fn coset_weights_refine(pi in 0usize..2, k in 0u8..4, m in 1u32..3) {
        let c = ctx(PRIMES[pi]);
        let e = algebra(&c, k);
        let parents = e.coset_reps(m).unwrap();
        let children = e.coset_reps(m + 1).unwrap();
        prop_assert_eq!(children.len(), parents.len() * c.p() as usize);
        prop_assert_eq!(children[0].1 * Rational64::from_integer(c.p()), parents[0].1);
        let keys: std::collections::BTreeSet<_> = parents.iter().map(|(x, _)| e.class_key(x, m).unwrap()).collect();
        prop_assert!(children.iter().all(|(x, _)| keys.contains(&e.class_key(x, m).unwrap())));
    }

    #[test]
    fn characters_are_homomorphisms(pi in 0usize..3, ram in any::<bool>(), cth in 2i32..5, xa in 1i64..400, xb in 0i64..400, ya in 1i64..400, yb in 0i64..400, tame in 0i64..10) {
        let c = ctx(PRIMES[pi]);
        let l = if ram { QuadAlgebra::ramified(&c, 1) } else { QuadAlgebra::inert(&c) };
        let v = if ram { -(cth / 2) - 1 } else { -cth };
        let th = MultChar::new(l, Some(l.elem(c.zero(), c.pi_pow(v))), tame, Phase::frac(1, 3)).unwrap();
        let x = l.ints(unit(&c, xa), xb);
        let y = l.ints(unit(&c, ya), yb) * l.uniformizer();
        prop_assert_eq!(th.eval(&(x * y)).unwrap(), th.eval(&x).unwrap() + th.eval(&y).unwrap());
        prop_assert_eq!(th.conjugate().eval(&x).unwrap(), th.eval(&x.conj()).unwrap());
        prop_assert_eq!(th.conductor(), th.conductor_scan().unwrap());
    }

    #[test]
    fn semi_valuation_axioms(pi in 0usize..2, kl in 0u8..2, side in any::<bool>(), g in prop::array::uniform8(-30i64..30), h in prop::array::uniform8(-30i64..30), s in -1i32..2) {
        let c = ctx(PRIMES[pi]);
        let l = algebra(&c, kl);
        let b = QuatAlgebra::on_side(l, if side { Side::Matrix } else { Side::Division }).unwrap();
        let mk = |v: &[i64; 8], sh: i32| -> QuatElem {
            let x = l.ints(v[0], v[1]) * l.pi_pow(sh) + l.ints(v[2], v[3]);
            let y = l.ints(v[4], v[5]) + l.ints(v[6], v[7]) * l.pi_pow(sh);
            b.elem(x, y)
        };
        let (g, h) = (mk(&g, s), mk(&h, -s));
        prop_assume!(!g.is_zero() && !h.is_zero());
        prop_assert!((g * h).nu2() >= g.nu2() + h.nu2());
        if !(g + h).is_zero() {
            prop_assert!((g + h).nu2() >= g.nu2().min(h.nu2()));
        }
        prop_assert_eq!(g.norm(), g.x.norm() - b.gamma() * g.y.norm());
        prop_assert_eq!((g * h).norm(), g.norm() * h.norm());
        let (gx, gy) = (g.orthogonal_decompose().0, g.orthogonal_decompose().1);
        let (hy, lx) = (h.orthogonal_decompose().1, h.orthogonal_decompose().0);
        prop_assume!(!gy.is_zero() && !hy.is_zero());
        prop_assert_eq!((gy * hy).nu2(), gy.nu2() + hy.nu2());
        if side {
            let m = b.matrix_model(&g).unwrap();
            prop_assert_eq!(m.det(), g.norm());
            prop_assert_eq!(m.trace(), g.trace());
        }
        let alpha = b.from_l(l.sqrt_d());
        prop_assert!(alpha.commutator(&gy).pair(&lx).is_zero());
        prop_assert_eq!(alpha.commutator(&gy).nu2(), alpha.nu2() + gy.nu2());
        let _ = gx;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simple_character_is_multiplicative(cth in 2i32..4, a in prop::array::uniform4(0i64..125), b in prop::array::uniform4(0i64..125)) {
        let c = Ctx::new(5, 16).unwrap();
        let case = if cth == 2 { 1 } else { 2 };
        let d = datum_for_case(&c, case, 1, 1, "default").unwrap();
        let (b4, l) = (d.b(), d.l());
        let mk = |v: &[i64; 4]| b4.elem(l.one() + l.ints(v[0], v[1]) * l.uniformizer(), l.ints(v[2], v[3]) * l.uniformizer());
        let (g1, g2) = (mk(&a), mk(&b));
        if let (Some(_), Some(_), Some(_)) = (d.zb1_membership(&g1), d.zb1_membership(&g2), d.zb1_membership(&(g1 * g2))) {
            if let (Coefficient::Value(x), Coefficient::Value(y), Coefficient::Value(z)) =
                (d.matrix_coefficient(&g1).unwrap(), d.matrix_coefficient(&g2).unwrap(), d.matrix_coefficient(&(g1 * g2)).unwrap())
            {
                prop_assert_eq!(z, x + y);
            }
        }
    }

    #[test]
    fn period_vanishes_or_is_constant(p in prop::sample::select(vec![5i64, 7]), case in prop::sample::select(vec![1u8, 3]), ek in 0u8..4, cchi in 0i32..4, x in 1i64..5) {
        let c = Ctx::new(p, 16).unwrap();
        let d = datum_for_case(&c, case, 1, 1, "default").unwrap();
        let e = algebra(&c, ek);
        prop_assume!(!(e.isomorphic(&d.l()) && e.d() != d.l().d()));
        let Ok(chi) = torus_char(&e, cchi, x, Phase::zero()) else { return Ok(()) };
        let Ok(pb) = PeriodProblem::new(d, chi) else { return Ok(()) };
        if pb.star_regime() {
            let rs = conductor_rs(&pb).unwrap();
            prop_assert!(rs.norm_route >= pb.chi().conductor_pi() + 3);
        }
        if let Ok(r) = period_routes().get("lpair-align").unwrap().integral(&pb) {
            if r.is_nonzero() {
                prop_assert!(r.all_phases_zero);
                let support = waldspurger::phase::rational_to_f64(r.support_measure);
                prop_assert!((r.brute.re - support).abs() < 1e-9 && r.brute.im.abs() < 1e-9);
                prop_assert!(r.predicted.contains(&r.support_measure));
            }
        }
    }

    #[test]
    fn archimedean_float_matches_exact(k in 2i64..9, m in 1i64..8, num in 1i64..40, den in 1i64..9) {
        prop_assume!(m < k);
        let xi = -Rational64::new(num, den);
        let exact = archimedean_orbital_exact(k, m, xi).unwrap();
        let float = archimedean_orbital(k, m, waldspurger::phase::rational_to_f64(xi)).unwrap();
        prop_assert!((waldspurger::phase::rational_to_f64(exact) - float).abs() < 1e-10 * float.abs().max(1.0));
        prop_assert_eq!(exact, archimedean_orbital_exact(k, -m, xi).unwrap());
    }
}

#[test]
fn split_elements_have_no_field_valuation() {
    let c = ctx(5);
    let s = QuadAlgebra::split(&c);
    let x: QuadElem = s.ints(1, 2);
    assert!(x.checked_v().is_err());
    assert_eq!(s.kind(), Kind::Split);
}

#[test]
fn orbital_depends_only_on_xi() {
    use waldspurger::orbital::{orbital_xi, OrbitalSetup};
    let c = Ctx::new(5, 16).unwrap();
    let d = datum_for_case(&c, 1, 1, 1, "default").unwrap();
    let e = QuadAlgebra::inert(&c);
    let pb = PeriodProblem::new(d, torus_char(&e, 3, 1, Phase::zero()).unwrap()).unwrap();
    let s = OrbitalSetup::new(pb).unwrap();
    for dd in [0, 2] {
        let xi = c.one() + c.int(2) * c.pi_pow(dd);
        let x = s.point_for(&xi).unwrap();
        let base = orbital_xi(&s, &x).unwrap();
        for u in [e.ints(1, 1), e.ints(2, 3), e.ints(0, 1)] {
            let y = x * u.norm_one_map().unwrap();
            assert_eq!(s.xi(&y), xi);
            let other = orbital_xi(&s, &y).unwrap();
            assert!((other.value - base.value).norm() < 1e-9, "d = {dd}: {} vs {}", other.value, base.value);
            assert_eq!(other.support_volume, base.support_volume);
        }
        let other = orbital_xi(&s, &x.conj()).unwrap();
        assert!((other.value - base.value).norm() < 1e-9);
    }
}
