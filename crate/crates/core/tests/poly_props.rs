//! Property tests for exact multivariate polynomials.

use proptest::prelude::*;

use njk_core::exact::Rational;
use njk_core::poly::Poly;
use njk_core::sample::{random_poly, random_rational, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b, c) = (random_poly(&mut r, n, 3, 4), random_poly(&mut r, n, 3, 4), random_poly(&mut r, n, 2, 3));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a + &(-&b), &a - &b);
        let k: Rational = random_rational(&mut r, 5);
        let mut acc = a.clone();
        acc.axpy(&k, &b);
        prop_assert_eq!(acc, &a + &b.scale(&k));
    }

    #[test]
    fn derivatives_obey_leibniz_and_commute(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b) = (random_poly(&mut r, n, 3, 4), random_poly(&mut r, n, 3, 4));
        for i in 0..n {
            prop_assert_eq!((&a * &b).deriv(i), &(&a.deriv(i) * &b) + &(&a * &b.deriv(i)));
            for j in 0..n {
                prop_assert_eq!(a.deriv(i).deriv(j), a.deriv(j).deriv(i));
            }
        }
    }

    #[test]
    fn degrees_add_under_products(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b) = (random_poly(&mut r, n, 3, 3), random_poly(&mut r, n, 3, 3));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (da, db) = (a.total_degree().unwrap(), b.total_degree().unwrap());
        prop_assert_eq!((&a * &b).total_degree(), Some(da + db));
    }

    #[test]
    fn display_parses_back(seed in any::<u64>(), n in 0usize..=3) {
        let mut r = rng(seed);
        let a = random_poly(&mut r, n, 3, 5);
        prop_assert_eq!(Poly::parse(&a.to_string(), n).unwrap(), a);
    }
}
