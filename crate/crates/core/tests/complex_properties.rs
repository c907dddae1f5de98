mod common;

use cyclic_bench::algebra::Chain;
use cyclic_bench::complexes::{
    build_truncated, conjugacy_split, connes_b, cyclic_quotient_coords, cyclic_tau, descends_on,
    hochschild_b, homogeneous_part, Convention, Variant,
};
use cyclic_bench::groups::{Group, DEFAULT_CAP};
use cyclic_bench::sample::{random_chain, ChainShape};
use proptest::prelude::*;

fn group_by_index(i: usize) -> Group {
    common::all_groups().swap_remove(i)
}

fn conventions() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::Standard), Just(Convention::Paper)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn b_squares_to_zero(gi in 0usize..5, seed in any::<u64>(), degree in 2usize..=5) {
        let g = group_by_index(gi);
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 6, 3));
        prop_assert!(hochschild_b(&g, &hochschild_b(&g, &x).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn standard_bicomplex_identities(gi in 0usize..5, seed in any::<u64>(), degree in 0usize..=4) {
        let g = group_by_index(gi);
        let c = Convention::Standard;
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 5, 3).gaussian());
        prop_assert!(connes_b(&g, &connes_b(&g, &x, c), c).is_zero());
        let bb = hochschild_b(&g, &connes_b(&g, &x, c)).unwrap();
        let anti = if degree == 0 { Chain::zero(0) } else { connes_b(&g, &hochschild_b(&g, &x).unwrap(), c) };
        prop_assert!(bb.plus(&anti).unwrap().is_zero());
    }

    #[test]
    fn operators_respect_the_length_filtration(gi in 0usize..5, seed in any::<u64>(), degree in 1usize..=4, c in conventions()) {
        let g = group_by_index(gi);
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 6, 3));
        let r = x.max_total_length(&g);
        prop_assert!(hochschild_b(&g, &x).unwrap().max_total_length(&g) <= r);
        prop_assert!(connes_b(&g, &x, c).max_total_length(&g) <= r);
        prop_assert!(cyclic_tau(&x, c).max_total_length(&g) <= r);
    }

    #[test]
    fn tau_has_the_convention_order(gi in 0usize..5, seed in any::<u64>(), degree in 0usize..=4, c in conventions()) {
        let g = group_by_index(gi);
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 5, 3));
        let mut y = x.clone();
        for _ in 0..=degree {
            y = cyclic_tau(&y, c);
        }
        let expected = match c {
            Convention::Standard => x.clone(),
            Convention::Paper if degree % 2 == 0 => x.scaled(&cyclic_bench::scalar::Scalar::from_int(-1)),
            Convention::Paper => x.clone(),
        };
        prop_assert_eq!(y, expected);
    }

    #[test]
    fn b_descends_to_the_cyclic_quotient(gi in 0usize..5, seed in any::<u64>(), degree in 1usize..=4) {
        let g = group_by_index(gi);
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 5, 3));
        prop_assert!(descends_on(&g, &x, Convention::Standard).unwrap());
        // (1−τ)x itself vanishes in the quotient
        let y = x.minus(&cyclic_tau(&x, Convention::Standard)).unwrap();
        prop_assert!(cyclic_quotient_coords(&y, Convention::Standard).is_empty());
    }

    #[test]
    fn split_resums_and_isolates_the_homogeneous_summand(gi in 0usize..5, seed in any::<u64>(), degree in 0usize..=3) {
        let g = group_by_index(gi);
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(degree, 8, 2));
        let parts = conjugacy_split(&g, &x);
        let total = parts.values().fold(Chain::zero(degree), |acc, p| acc.plus(p).unwrap());
        prop_assert_eq!(&total, &x);
        let h = homogeneous_part(&g, &x);
        prop_assert!(h.terms().all(|(t, _)| g.is_identity(&g.product(t))));
        let rest = x.minus(&h).unwrap();
        prop_assert!(rest.terms().all(|(t, _)| !g.is_identity(&g.product(t))));
        let e_class = g.conjugacy_class_of(&g.identity());
        prop_assert_eq!(parts.get(&e_class).cloned().unwrap_or_else(|| Chain::zero(degree)), h);
    }
}

#[test]
fn paper_sign_breaks_b_squared_of_connes() {
    let g = common::f2();
    let mut failures = 0;
    for seed in 0..50 {
        let x = random_chain(&g, &mut common::rng(seed), &ChainShape::new(1, 4, 2));
        if !connes_b(&g, &connes_b(&g, &x, Convention::Paper), Convention::Paper).is_zero() {
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn hh0_matches_the_commutator_oracle() {
    for (g, expected) in [(common::s3(), 3), (common::z4(), 4), (common::v4(), 4)] {
        assert_eq!(common::hh0_oracle(&g), expected);
        // diameter × (n+1) with n = 1 covers every tuple
        let r = g.diameter().unwrap() * 2;
        let cx = build_truncated(
            &g,
            1,
            r,
            Variant::Hochschild,
            Convention::Standard,
            DEFAULT_CAP,
        )
        .unwrap();
        assert_eq!(cx.homology(0).unwrap().dim, expected, "{}", g.label());
    }
}

#[test]
fn truncated_matrices_compose_to_zero() {
    for g in [common::s3(), common::z2(), common::f2()] {
        for variant in [
            Variant::Hochschild,
            Variant::Normalized,
            Variant::CyclicQuotient,
            Variant::ConnectiveTc,
        ] {
            let cx = build_truncated(&g, 3, 3, variant, Convention::Standard, DEFAULT_CAP).unwrap();
            assert!(cx.is_complex(), "{} {variant}", g.label());
        }
    }
}

#[test]
fn finite_group_homology_is_concentrated_in_degree_zero() {
    // ℂ[G] is separable, so HH_n = 0 for n > 0 once the stage sees every tuple
    let g = common::z4();
    let r = g.diameter().unwrap() * 3;
    let cx = build_truncated(
        &g,
        2,
        r,
        Variant::Hochschild,
        Convention::Standard,
        DEFAULT_CAP,
    )
    .unwrap();
    assert_eq!(cx.homology(0).unwrap().dim, 4);
    assert_eq!(cx.homology(1).unwrap().dim, 0);
}
