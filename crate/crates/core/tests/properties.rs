mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use igusa_core::newton::{polyhedron_of, polyhedron_of_series, verify_partition};
use igusa_core::nondegen::is_nondegenerate;
use igusa_core::onevar::{one_var_zeta, OneVarOptions};
use igusa_core::oracle::{count_solutions, is_measure_sequence, verify_zeta};
use igusa_core::padic::valuation_rational;
use igusa_core::series::Exponent;
use igusa_core::truncation::square_tail_family;
use igusa_core::zeta::{igusa_zeta_newton, ZetaOptions};
use igusa_core::{parse_expression, Exec, PolySeries, PrimeContext, ZetaError};

use common::{check_lift, planted};

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Two-variable polynomials with unit coefficients and `f(0) = 0`.
fn arb_poly2(p: u64) -> impl Strategy<Value = PolySeries> {
    prop::collection::vec(((0u32..=4, 0u32..=4), 1..p as i64), 1..=4).prop_filter_map(
        "needs a nonconstant term",
        |terms| {
            let terms: Vec<_> = terms
                .into_iter()
                .filter(|((i, j), _)| i + j > 0)
                .map(|((i, j), c)| (Exponent(vec![i, j]), BigRational::from_integer(c.into())))
                .collect();
            let f = PolySeries::from_terms(2, terms).unwrap();
            (!f.is_zero()).then_some(f)
        },
    )
}

fn arb_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn newton(f: &PolySeries, p: u64) -> Result<igusa_core::ZetaRational, ZetaError> {
    igusa_zeta_newton(f, &ctx(p), ZetaOptions::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hensel_lifts_satisfy_the_contract(
        p in arb_prime(),
        a in -40i64..40,
        e in 0u32..=2,
        k in 1u32..=3,
        u in 1i64..50,
        r in -20i64..20,
        higher in prop::collection::vec(-9i64..=9, 0..4),
    ) {
        prop_assume!(u % p as i64 != 0);
        let f = planted(p, a, e, k, u, r, &higher);
        prop_assert_eq!(check_lift(&f, a, e, k, p, 32), Ok(()));
    }

    #[test]
    fn valuation_is_multiplicative(
        p in arb_prime(),
        a in (1i64..100_000, 1i64..100_000),
        b in (1i64..100_000, 1i64..100_000),
        signs in (any::<bool>(), any::<bool>()),
    ) {
        let x = q(if signs.0 { a.0 } else { -a.0 }, a.1);
        let y = q(if signs.1 { b.0 } else { -b.0 }, b.1);
        let v = |z: &BigRational| valuation_rational(z, p).unwrap();
        prop_assert_eq!(v(&(&x * &y)), v(&x) + v(&y));
        prop_assert_eq!(v(&(&x / &y)), v(&x) - v(&y));
    }

    #[test]
    fn taylor_shift_matches_evaluation(
        p in arb_prime(),
        coeffs in prop::collection::vec(-20i64..20, 1..6),
        alpha in -10i64..10,
        m in 0u32..4,
        y in -5i64..5,
    ) {
        let terms: Vec<_> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (Exponent(vec![i as u32]), BigRational::from_integer(c.into())))
            .collect();
        let f = PolySeries::from_terms(1, terms).unwrap();
        let shifted = f.taylor_shift_exact(&BigInt::from(alpha), p, m);
        let y = BigRational::from_integer(y.into());
        let at_y = shifted.iter().rev().fold(BigRational::zero(), |acc, c| acc * &y + c);
        let x = BigRational::from_integer(alpha.into())
            + BigRational::from_integer(num_traits::pow(BigInt::from(p), m as usize)) * &y;
        prop_assert_eq!(at_y, f.eval(&[x]));
    }

    #[test]
    fn render_parse_round_trip(
        terms in prop::collection::vec(((0u32..4, 0u32..4, 0u32..3), -30i64..30, 1i64..6), 0..6),
    ) {
        let f = PolySeries::from_terms(
            3,
            terms.into_iter().map(|((i, j, l), n, d)| (Exponent(vec![i, j, l]), q(n, d))),
        ).unwrap();
        prop_assert_eq!(parse_expression(&f.render(), Some(3)).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zeta_is_invariant_under_swapping_variables(p in prop::sample::select(vec![2u64, 3]), f in arb_poly2(3)) {
        let g = f.permute(&[1, 0]);
        match (newton(&f, p), newton(&g, p)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a.kind(), b.kind()),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
        let pf = polyhedron_of(&f, 4).unwrap();
        let pg = polyhedron_of(&g, 4).unwrap();
        let mut nf: Vec<u64> = is_nondegenerate(&f, &pf, &ctx(p), Exec::Sequential).unwrap().faces.iter().map(|v| v.n_tau).collect();
        let mut ng: Vec<u64> = is_nondegenerate(&g, &pg, &ctx(p), Exec::Sequential).unwrap().faces.iter().map(|v| v.n_tau).collect();
        nf.sort_unstable();
        ng.sort_unstable();
        prop_assert_eq!(nf, ng);
    }

    #[test]
    fn zeta_agrees_with_congruence_counts(p in prop::sample::select(vec![2u64, 3]), f in arb_poly2(3)) {
        let Ok(z) = newton(&f, p) else { return Ok(()) };
        let series = z.series(8);
        prop_assert!(is_measure_sequence(&series));
        let counts = count_solutions(&f, &ctx(p), 4, Exec::Parallel).unwrap();
        let report = verify_zeta(&z, &counts);
        prop_assert!(report.pass, "{} at p = {}: {:?}", f.render(), p, report.first_mismatch);
    }

    #[test]
    fn nondegeneracy_survives_p_multiples_inside_gamma(
        p in prop::sample::select(vec![2u64, 3, 5]),
        f in arb_poly2(3),
        extra in prop::collection::vec((0usize..4, (0u32..3, 0u32..3), -5i64..5), 1..4),
    ) {
        let poly = polyhedron_of(&f, 4).unwrap();
        let gens = poly.generators();
        let mut g = f.clone();
        for (which, (di, dj), c) in extra {
            if di + dj == 0 || c == 0 {
                continue;
            }
            let base = &gens[which % gens.len()];
            let w = Exponent(vec![base.0[0] + di, base.0[1] + dj]);
            g.add_term(w, BigRational::from_integer((c * p as i64).into()));
        }
        prop_assert_eq!(polyhedron_of(&g, 4).unwrap(), poly.clone());
        let a = is_nondegenerate(&f, &poly, &ctx(p), Exec::Sequential).unwrap();
        let b = is_nondegenerate(&g, &poly, &ctx(p), Exec::Sequential).unwrap();
        prop_assert_eq!(a.nondegenerate, b.nondegenerate);
        prop_assert_eq!(a.counts(), b.counts());
        if let (Ok(za), Ok(zb)) = (newton(&f, p), newton(&g, p)) {
            prop_assert_eq!(za, zb);
        }
    }

    #[test]
    fn cones_partition_the_orthant(f in arb_poly2(5)) {
        let poly = polyhedron_of(&f, 4).unwrap();
        let report = verify_partition(&poly, 6, Exec::Sequential).unwrap();
        prop_assert!(report.pass, "{}: {:?}", f.render(), report.failures.first());
    }

    #[test]
    fn engines_agree_in_one_variable(
        p in prop::sample::select(vec![2u64, 3, 5]),
        coeffs in prop::collection::vec(-12i64..12, 1..6),
        low in 1u32..3,
    ) {
        let terms: Vec<_> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (Exponent(vec![i as u32 + low]), BigRational::from_integer(c.into())))
            .collect();
        let f = PolySeries::from_terms(1, terms).unwrap();
        prop_assume!(!f.is_zero());
        let Ok(z) = newton(&f, p) else { return Ok(()) };
        let opts = OneVarOptions { depth_limit: 40, exec: Exec::Sequential };
        prop_assert_eq!(one_var_zeta(&f, &ctx(p), opts).unwrap().zeta, z);
    }
}

#[test]
fn truncations_past_the_generator_bound_share_the_polyhedron() {
    for p in [2, 3, 5] {
        let f = square_tail_family(p).unwrap();
        let whole = polyhedron_of_series(&f, 4).unwrap();
        let bound = f.support_bound().unwrap();
        for d in bound..bound + 10 {
            assert_eq!(
                polyhedron_of(&f.truncate(d), 4).unwrap(),
                whole,
                "p = {p}, D = {d}"
            );
        }
    }
}

#[test]
fn three_variable_permutations() {
    let f = parse_expression("x^2 + y^3 + x*z^2 + y*z", None).unwrap();
    let p = 3;
    let base = newton(&f, p);
    for perm in [[0, 2, 1], [1, 0, 2], [2, 1, 0], [1, 2, 0]] {
        let g = f.permute(&perm);
        match (&base, newton(&g, p)) {
            (Ok(a), Ok(b)) => assert_eq!(*a, b, "{perm:?}"),
            (Err(a), Err(b)) => assert_eq!(a.kind(), b.kind()),
            (a, b) => panic!("{a:?} vs {b:?}"),
        }
    }
}

#[test]
fn measures_sum_to_one() {
    let f = parse_expression("x^3 + x*y + y^2", None).unwrap();
    let z = newton(&f, 2).unwrap();
    let total: BigRational = z.series(60).iter().sum();
    assert!(total <= BigRational::one());
    assert!(BigRational::one() - total < q(1, 1_000_000));
}
