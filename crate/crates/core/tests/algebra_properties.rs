mod common;

use cyclic_bench::algebra::{
    amax_seminorm, check_unconditional, convolve, nu_lambda, reduced_norm, AlgebraElement,
    SeminormKind,
};
use cyclic_bench::groups::Group;
use cyclic_bench::sample::{random_algebra_element, random_scalar};
use cyclic_bench::scalar::{Magnitude, Scalar};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn group_by_index(i: usize) -> Group {
    common::all_groups().swap_remove(i)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_associative_and_unital(gi in 0usize..5, seed in any::<u64>(), gaussian in any::<bool>()) {
        let g = group_by_index(gi);
        let mut rng = common::rng(seed);
        let x = random_algebra_element(&g, &mut rng, 4, 3, gaussian);
        let y = random_algebra_element(&g, &mut rng, 4, 3, gaussian);
        let z = random_algebra_element(&g, &mut rng, 4, 3, gaussian);
        prop_assert_eq!(convolve(&g, &convolve(&g, &x, &y), &z), convolve(&g, &x, &convolve(&g, &y, &z)));
        let unit = AlgebraElement::delta(g.identity());
        prop_assert_eq!(convolve(&g, &unit, &x), x.clone());
        prop_assert_eq!(convolve(&g, &x, &unit), x);
    }

    #[test]
    fn nu_is_submultiplicative_and_monotone(gi in 0usize..5, seed in any::<u64>()) {
        let g = group_by_index(gi);
        let mut rng = common::rng(seed);
        let x = random_algebra_element(&g, &mut rng, 4, 3, false);
        let y = random_algebra_element(&g, &mut rng, 4, 3, false);
        let grid = [q(1, 1), q(9, 8), q(3, 2), q(2, 1), q(3, 1)];
        for l in &grid {
            let xy = nu_lambda(&g, &convolve(&g, &x, &y), l).unwrap();
            let prod = nu_lambda(&g, &x, l).unwrap().mul(&nu_lambda(&g, &y, l).unwrap());
            prop_assert_eq!(xy.certain_le(&prod), Some(true));
        }
        for w in grid.windows(2) {
            prop_assert_eq!(nu_lambda(&g, &x, &w[0]).unwrap().certain_le(&nu_lambda(&g, &x, &w[1]).unwrap()), Some(true));
        }
    }

    #[test]
    fn reduced_norm_is_dominated_by_l1_on_finite_groups(gi in 0usize..3, seed in any::<u64>(), gaussian in any::<bool>()) {
        let g = group_by_index(gi);
        let mut rng = common::rng(seed);
        let x = random_algebra_element(&g, &mut rng, 5, 3, gaussian);
        let r = reduced_norm(&g, &x, 64).unwrap();
        let nu1 = nu_lambda(&g, &x, &q(1, 1)).unwrap();
        prop_assert_eq!(r.certain_le(&nu1), Some(true), "{} vs {}", r, nu1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reduced_norm_is_dominated_by_l1_on_z2(seed in any::<u64>()) {
        let g = common::z2();
        let mut rng = common::rng(seed);
        let x = random_algebra_element(&g, &mut rng, 3, 2, false);
        let r = reduced_norm(&g, &x, 64).unwrap();
        let nu1 = nu_lambda(&g, &x, &q(1, 1)).unwrap();
        // the enclosure may straddle ν₁ only when the norm attains it
        prop_assert!(r.lo() <= nu1.hi(), "{} vs {}", r, nu1);
    }
}

/// `x` with each coefficient's modulus enlarged by a random nonnegative amount.
fn dominating(x: &AlgebraElement, rng: &mut impl Rng) -> AlgebraElement {
    AlgebraElement::from_terms(x.terms().map(|(g, c)| {
        let bump = Scalar::from_int(rng.gen_range(0..3));
        let m = c.abs_coefficients_hint();
        (g.clone(), &m + &bump)
    }))
}

trait AbsHint {
    fn abs_coefficients_hint(&self) -> Scalar;
}

impl AbsHint for Scalar {
    fn abs_coefficients_hint(&self) -> Scalar {
        match self.abs() {
            Magnitude::Exact(r) => Scalar::real(r),
            Magnitude::Enclosure { .. } => panic!("rational moduli only"),
        }
    }
}

#[test]
fn amax_is_unconditional_on_finite_groups() {
    let mut rng = common::rng(11);
    for g in [common::z4(), common::s3(), common::v4()] {
        let samples: Vec<_> = (0..30)
            .map(|_| {
                let x = AlgebraElement::from_terms((0..4).map(|_| {
                    (
                        cyclic_bench::sample::random_element(&g, &mut rng, 3),
                        random_scalar(&mut rng, 4, false),
                    )
                }));
                let x2 = dominating(&x, &mut rng);
                (x, x2)
            })
            .collect();
        let rep = check_unconditional(&g, &SeminormKind::Max { resolution: 64 }, &samples).unwrap();
        assert!(rep.passed(), "{}: {:?}", g.label(), rep.violations);
        assert_eq!(rep.absolute_checked, 30);
    }
}

#[test]
fn amax_equals_l1_on_amenable_groups() {
    // on amenable groups ‖|x|‖_r = Σ|x_g|
    let mut rng = common::rng(5);
    for g in [common::z4(), common::s3(), common::z2()] {
        for _ in 0..10 {
            let x = random_algebra_element(&g, &mut rng, 4, 2, false);
            let expected = nu_lambda(&g, &x, &q(1, 1)).unwrap();
            assert_eq!(amax_seminorm(&g, &x, 64).unwrap(), expected);
        }
    }
}
