use super::*;
use proptest::prelude::*;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn tol_digits(k: u32) -> BigRational {
    pow10_inv(k)
}

#[test]
fn parse_formats_round_trip() {
    for s in ["3/8", "-1/3", "quad:-1,1,5,2", "0.61803398874989@14", "0.25", "7", "-0.5@3"] {
        let spec: RealSpec = s.parse().unwrap();
        let again: RealSpec = spec.to_string().parse().unwrap();
        assert_eq!(spec, again, "{s}");
        assert_eq!(spec.to_string(), again.to_string());
    }
    assert_eq!("2/4".parse::<RealSpec>().unwrap().to_string(), "1/2");
    assert!("quad:1,1,4,1".parse::<RealSpec>().is_err());
    assert!("1/0".parse::<RealSpec>().is_err());
    assert!("0.5@0".parse::<RealSpec>().is_err());
    assert!("abc".parse::<RealSpec>().is_err());
    assert!(".".parse::<RealSpec>().is_err());
}

#[test]
fn dist_examples() {
    let t = tol_digits(20);
    assert_eq!(dist_to_nearest_int(&RealSpec::rational(1, 2), &t).unwrap(), CertifiedInterval::point(q(1, 2)));
    assert_eq!(dist_to_nearest_int(&RealSpec::rational(9, 4), &t).unwrap(), CertifiedInterval::point(q(1, 4)));

    // √2 at 1e-20 against a 30-digit decimal oracle
    let sqrt2 = RealSpec::quadratic(0, 1, 2, 1).unwrap();
    let iv = dist_to_nearest_int(&sqrt2, &t).unwrap();
    assert!(iv.width() <= t);
    let oracle: BigRational = parse_decimal("0.414213562373095048801688724209698").unwrap();
    let slack = tol_digits(30);
    assert!(iv.lo() <= &(&oracle + &slack) && &(&oracle - &slack) <= iv.hi());
}

#[test]
fn frac_examples() {
    let t = tol_digits(10);
    assert_eq!(frac_mod1(&RealSpec::rational(7, 4), &t).unwrap(), CertifiedInterval::point(q(3, 4)));
    assert_eq!(frac_mod1(&RealSpec::rational(-1, 3), &t).unwrap(), CertifiedInterval::point(q(2, 3)));

    // 10^6 (√2 − 1) = 414213.56237309504880…
    let x = RealSpec::quadratic(-1_000_000, 1_000_000, 2, 1).unwrap();
    let iv = frac_mod1(&x, &t).unwrap();
    assert!(iv.width() <= t);
    let oracle: BigRational = parse_decimal("0.56237309504880168872").unwrap();
    assert!(iv.lo() <= &(&oracle + tol_digits(19)) && &(&oracle - tol_digits(19)) <= iv.hi());
}

#[test]
fn budgeted_decimal_fails_at_large_scale() {
    let x: RealSpec = "0.61803398874989@14".parse().unwrap();
    let t = tol_digits(6);
    assert!(frac_of_multiple(&x, &BigInt::from(1000), &t).is_ok());
    let err = frac_of_multiple(&x, &BigInt::from(10).pow(12), &t).unwrap_err();
    assert!(matches!(err, Error::InsufficientPrecision(_)));
    let err = linear_form_dist(&BigInt::from(10).pow(12), &x, &RealSpec::integer(0), &t).unwrap_err();
    assert!(matches!(err, Error::InsufficientPrecision(_)));
}

#[test]
fn linear_form_examples() {
    let t = tol_digits(20);
    let half = RealSpec::rational(1, 2);
    let r = linear_form_dist(&BigInt::from(4), &half, &RealSpec::integer(0), &t).unwrap();
    assert_eq!(r, CertifiedInterval::point(q(0, 1)));
    let r = linear_form_dist(&BigInt::one(), &half, &RealSpec::rational(1, 4), &t).unwrap();
    assert_eq!(r, CertifiedInterval::point(q(1, 4)));
}

#[test]
fn convergent_denominators_of_silver_ratio() {
    // √2 − 1 = [0; 2, 2, 2, …]: q_{k+1} = 2 q_k + q_{k−1}
    let alpha = RealSpec::silver_conjugate();
    let zero = RealSpec::integer(0);
    let (mut prev, mut cur) = (BigInt::one(), BigInt::from(2));
    for _k in 1..=20 {
        let next: BigInt = &cur * 2u32 + &prev;
        let bound = BigRational::new(BigInt::one(), next.clone());
        let d = linear_form_dist(&cur, &alpha, &zero, &tol_digits(60)).unwrap();
        assert!(d.hi() < &bound);
        prev = std::mem::replace(&mut cur, next);
    }
}

#[test]
fn quadratic_tolerance_1e30_up_to_2_pow_64() {
    let t = tol_digits(30);
    let alpha = RealSpec::golden_conjugate();
    let gamma = RealSpec::rational(1, 3);
    for e in [1u32, 20, 40, 63, 64] {
        let n = BigInt::from(2).pow(e) - 1;
        let d = linear_form_dist(&n, &alpha, &gamma, &t).unwrap();
        assert!(d.width() <= t);
    }
}

#[test]
fn mixed_fields_use_intervals() {
    let t = tol_digits(25);
    let alpha = RealSpec::silver_conjugate();
    let gamma: RealSpec = "0.7@30".parse().unwrap();
    let d = linear_form_dist(&BigInt::from(12345), &alpha, &gamma, &t).unwrap();
    assert!(d.width() <= t);
    let approx = (12345.0 * (2f64.sqrt() - 1.0) - 0.7).rem_euclid(1.0);
    let approx = approx.min(1.0 - approx);
    assert!((d.mid_f64() - approx).abs() < 1e-9);
}

fn small_rational() -> impl Strategy<Value = (i64, i64)> {
    (-10_000i64..10_000, 1i64..5_000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn exact_rational_soundness((p, d) in small_rational(), n in -1000i64..1000) {
        // ‖n p/d‖ computed with integer arithmetic
        let m = (n * p).rem_euclid(d);
        let oracle = q(m.min(d - m), d);
        let r = linear_form_dist(&BigInt::from(n), &RealSpec::rational(p, d), &RealSpec::integer(0), &tol_digits(5)).unwrap();
        prop_assert!(r.contains(&oracle));
        prop_assert!(r.lo() >= &BigRational::zero() && r.hi() <= &half());
    }

    #[test]
    fn distance_symmetries((p, d) in small_rational(), m in -50i64..50) {
        let t = tol_digits(12);
        let x = dist_to_nearest_int(&RealSpec::rational(p, d), &t).unwrap();
        let neg = dist_to_nearest_int(&RealSpec::rational(-p, d), &t).unwrap();
        let shifted = dist_to_nearest_int(&RealSpec::rational(p + m * d, d), &t).unwrap();
        prop_assert_eq!(&x, &neg);
        prop_assert_eq!(&x, &shifted);
    }

    #[test]
    fn quadratic_distance_symmetries(a in -50i64..50, b in 1i64..20, d in prop::sample::select(vec![2i64, 3, 5, 7, 13]), m in -20i64..20) {
        let t = tol_digits(25);
        let x = dist_to_nearest_int(&RealSpec::quadratic(a, b, d, 3).unwrap(), &t).unwrap();
        let neg = dist_to_nearest_int(&RealSpec::quadratic(-a, -b, d, 3).unwrap(), &t).unwrap();
        let shifted = dist_to_nearest_int(&RealSpec::quadratic(a + 3 * m, b, d, 3).unwrap(), &t).unwrap();
        prop_assert_eq!(&x, &neg);
        prop_assert_eq!(&x, &shifted);
    }

    #[test]
    fn refinement_is_monotone(n in 1i64..1_000_000, k in 5u32..40) {
        let alpha = RealSpec::golden_conjugate();
        let gamma = RealSpec::rational(2, 7);
        let coarse = linear_form_dist(&BigInt::from(n), &alpha, &gamma, &tol_digits(k)).unwrap();
        let fine = linear_form_dist(&BigInt::from(n), &alpha, &gamma, &tol_digits(k + 7)).unwrap();
        prop_assert!(coarse.encloses(&fine));
    }
}

#[test]
fn decimal_refinement_is_nested() {
    // refining a budgeted decimal stays inside the coarser enclosure
    let x: RealSpec = "0.1234567890123456789012345@25".parse().unwrap();
    let n = BigInt::from(1_000_003);
    let coarse = x.enclose_multiple(&n, &tol_digits(10)).unwrap();
    let fine = x.enclose_multiple(&n, &tol_digits(15)).unwrap();
    assert!(coarse.encloses(&fine));
}
