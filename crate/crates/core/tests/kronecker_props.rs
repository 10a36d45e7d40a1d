use lacunary_core::kronecker::{
    build_inhom_sequence, dispersion, gap_report, orbit_block, three_distance_check, validate_lacunary, verify_inhom_terms, PointBlock,
};
use lacunary_core::RealSpec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn tol() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u64).pow(40))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn three_distance_for_rationals(p in 1i64..1000, q in 2i64..1000, n in 2usize..300) {
        let alpha = RealSpec::rational(p % q, q);
        let r = three_distance_check(&alpha, n, &tol()).unwrap();
        prop_assert!(r.holds(), "{} N={} {:?}", alpha, n, r.distinct_count);
    }

    #[test]
    fn gaps_partition_the_circle(p in 0i64..500, q in 1i64..500, n in 2usize..200) {
        let alpha = RealSpec::rational(p % q, q);
        let block = orbit_block(&alpha, n, &tol()).unwrap();
        let report = gap_report(&block);
        let total: BigRational = report
            .gaps
            .iter()
            .map(|g| g.length.lo() * BigRational::from_integer(g.multiplicity.into()))
            .fold(BigRational::zero(), |a, b| a + b);
        prop_assert_eq!(total, BigRational::one());
        prop_assert_eq!(dispersion(&block), report.dispersion);
    }

    #[test]
    fn rational_blocks_match_gap_report(nums in prop::collection::vec(0i64..97, 1..40)) {
        let pts: Vec<BigRational> = nums.iter().map(|&x| BigRational::new(x.into(), 97.into())).collect();
        let block = PointBlock::from_rationals(&pts).unwrap();
        prop_assert_eq!(dispersion(&block), gap_report(&block).dispersion);
    }
}

#[test]
fn quadratic_orbits_have_three_distances() {
    for spec in ["quad:-1,1,5,2", "quad:-1,1,2,1", "quad:0,1,3,1", "quad:1,1,7,3"] {
        let alpha: RealSpec = spec.parse().unwrap();
        for n in [2, 3, 10, 55, 89, 144, 377, 1000] {
            assert!(three_distance_check(&alpha, n, &tol()).unwrap().holds(), "{spec} N={n}");
        }
    }
}

#[test]
fn golden_orbit_dispersion_is_order_one_over_n() {
    let alpha = RealSpec::golden_conjugate();
    for n in [2usize, 5, 13, 50, 100, 377, 1000] {
        let d = dispersion(&orbit_block(&alpha, n, &tol()).unwrap());
        assert!(d.hi_f64() * n as f64 <= 3.0, "N={n}: {}", d.hi_f64() * n as f64);
    }
}

#[test]
fn inhomogeneous_sequences_revalidate() {
    for (a, g) in [
        ("quad:-1,1,5,2", "0"),
        ("quad:-1,1,2,1", "1/3"),
        ("quad:-1,1,5,2", "0.7@20"),
        ("quad:0,1,3,1", "1/2"),
    ] {
        let alpha: RealSpec = a.parse().unwrap();
        let gamma: RealSpec = g.parse().unwrap();
        let s = build_inhom_sequence(&alpha, &gamma, 10, None).unwrap();
        let r = validate_lacunary(s.sequence.terms()).unwrap();
        assert!(r > BigRational::from_integer(2.into()) * (BigRational::one() - BigRational::new(1.into(), (1u64 << 19).into())));
        let again = verify_inhom_terms(s.sequence.terms(), &alpha, &gamma, s.lambda, 10).unwrap();
        assert!(again.iter().all(|c| c.holds()), "{a} {g}");
    }
}
