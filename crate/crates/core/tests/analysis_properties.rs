mod common;

use cyclic_bench::analysis::{
    bar_coboundary, eta_seminorm, fitted_constant, growth_fit, CochainSpec, EtaParams,
    GrowthOptions,
};
use cyclic_bench::groups::{Group, DEFAULT_CAP};
use cyclic_bench::sample::{random_chain, random_table_cochain, ChainShape};
use cyclic_bench::scalar::rational_pow;
use num_rational::BigRational;
use proptest::prelude::*;

fn group_by_index(i: usize) -> Group {
    common::all_groups().swap_remove(i)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coboundary_squares_to_zero(gi in 0usize..5, seed in any::<u64>(), arity in 0usize..=2) {
        let g = group_by_index(gi);
        let mut rng = common::rng(seed);
        let phi = random_table_cochain(&g, &mut rng, arity, 6, 2).build(&g).unwrap();
        let dd = bar_coboundary(&g, &bar_coboundary(&g, &phi));
        for (t, _) in g.tuples_within(arity + 2, 4, DEFAULT_CAP).unwrap() {
            prop_assert!(dd.evaluate(&t).unwrap().is_zero());
        }
    }

    #[test]
    fn fitted_constants_are_monotone(gi in 0usize..5, seed in any::<u64>()) {
        let g = group_by_index(gi);
        let phi = random_table_cochain(&g, &mut common::rng(seed), 2, 8, 3).build(&g).unwrap();
        let lambdas = vec![q(9, 8), q(5, 4), q(3, 2), q(2, 1)];
        let rep = growth_fit(&g, &phi, &GrowthOptions { lambdas: lambdas.clone(), radii: vec![2, 4, 6], cap: DEFAULT_CAP }).unwrap();
        for l in &lambdas {
            for w in [2, 4, 6].windows(2) {
                prop_assert_eq!(rep.constant(l, w[0]).unwrap().certain_le(rep.constant(l, w[1]).unwrap()), Some(true));
            }
        }
        for w in lambdas.windows(2) {
            for r in [2, 4, 6] {
                prop_assert_eq!(rep.constant(&w[1], r).unwrap().certain_le(rep.constant(&w[0], r).unwrap()), Some(true));
            }
        }
    }

    #[test]
    fn eta_is_monotone_in_m_and_n(gi in 0usize..5, seed in any::<u64>(), degree in 0usize..=4, m in 0u32..4, n in 1i64..5) {
        let g = group_by_index(gi);
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 5, 3));
        let lambda = q(3, 2);
        let base = EtaParams::new(q(n, 1), m, lambda.clone()).unwrap();
        let more_m = EtaParams::new(q(n, 1), m + 1, lambda.clone()).unwrap();
        let more_n = EtaParams::new(q(n + 1, 1), m, lambda).unwrap();
        let v = eta_seminorm(&g, &x, &base);
        prop_assert_eq!(v.certain_le(&eta_seminorm(&g, &x, &more_m)), Some(true));
        prop_assert_eq!(eta_seminorm(&g, &x, &more_n).certain_le(&v), Some(true));
    }
}

#[test]
fn constructed_bounds_dominate_the_fit() {
    for g in [common::z2(), common::f2()] {
        let specs = [
            CochainSpec::Exponential {
                arity: 2,
                base: "3/2".into(),
            },
            CochainSpec::LengthPower { arity: 1, power: 3 },
            CochainSpec::LengthPower { arity: 2, power: 1 },
        ];
        for spec in specs {
            let phi = spec.build(&g).unwrap();
            let b = phi.declared_bound().unwrap().clone();
            for lambda in [b.lambda.clone(), &b.lambda * q(2, 1)] {
                for r in [2, 4, 6] {
                    let c = fitted_constant(&g, &phi, &lambda, r, DEFAULT_CAP).unwrap();
                    assert!(
                        c.hi() <= &b.constant,
                        "{} λ = {lambda} R = {r}: {c}",
                        phi.name()
                    );
                }
            }
        }
    }
    let z2 = common::z2();
    let area = CochainSpec::Area { pair: (0, 1) }.build(&z2).unwrap();
    assert!(
        fitted_constant(&z2, &area, &q(2, 1), 6, DEFAULT_CAP)
            .unwrap()
            .hi()
            <= &q(1, 1)
    );
}

#[test]
fn growth_examples_match_closed_forms() {
    // ℤ, φ(t^k) = k at λ = 2: max_{|k|≤R} |k|·2^{−|k|}
    let z = Group::free_abelian(1).unwrap();
    let phi = CochainSpec::Homomorphism {
        values: vec!["1".into()],
    }
    .build(&z)
    .unwrap();
    for r in 1..=8u64 {
        let oracle = (0..=r as i64)
            .map(|k| q(k, 1) * rational_pow(&q(2, 1), -k))
            .max()
            .unwrap();
        assert_eq!(
            fitted_constant(&z, &phi, &q(2, 1), r, DEFAULT_CAP)
                .unwrap()
                .as_exact(),
            Some(&oracle)
        );
    }
    // 3^{|k|} at λ = 2 grows as (3/2)^R; at λ = 4 it is 3/4
    let phi = CochainSpec::Exponential {
        arity: 1,
        base: "3".into(),
    }
    .build(&z)
    .unwrap();
    for r in 1..=8u64 {
        assert_eq!(
            fitted_constant(&z, &phi, &q(2, 1), r, DEFAULT_CAP)
                .unwrap()
                .as_exact(),
            Some(&rational_pow(&q(3, 2), r as i64))
        );
        assert_eq!(
            fitted_constant(&z, &phi, &q(4, 1), r, DEFAULT_CAP)
                .unwrap()
                .as_exact(),
            Some(&q(3, 4))
        );
    }
}
