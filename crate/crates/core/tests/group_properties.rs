mod common;

use cyclic_bench::groups::{Group, GroupElement, DEFAULT_CAP};
use cyclic_bench::sample::random_element;
use proptest::prelude::*;

fn group_by_index(i: usize) -> Group {
    common::all_groups().swap_remove(i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_length_is_subadditive_and_symmetric(gi in 0usize..5, seed in any::<u64>()) {
        let g = group_by_index(gi);
        let mut rng = common::rng(seed);
        for _ in 0..20 {
            let (x, y) = (random_element(&g, &mut rng, 6), random_element(&g, &mut rng, 6));
            prop_assert!(g.word_length(&g.multiply(&x, &y)) <= g.word_length(&x) + g.word_length(&y));
            prop_assert_eq!(g.word_length(&g.inverse(&x)), g.word_length(&x));
        }
    }

    #[test]
    fn conjugacy_class_is_invariant(gi in 0usize..5, seed in any::<u64>()) {
        let g = group_by_index(gi);
        let mut rng = common::rng(seed);
        for _ in 0..20 {
            let (x, h) = (random_element(&g, &mut rng, 5), random_element(&g, &mut rng, 5));
            let conj = g.multiply(&g.multiply(&h, &x), &g.inverse(&h));
            prop_assert_eq!(g.conjugacy_class_of(&conj), g.conjugacy_class_of(&x));
        }
    }

    #[test]
    fn free_words_are_reduced(seed in any::<u64>(), rank in 1usize..4) {
        let g = Group::free(rank).unwrap();
        let mut rng = common::rng(seed);
        for _ in 0..20 {
            let x = g.multiply(&random_element(&g, &mut rng, 8), &random_element(&g, &mut rng, 8));
            match x {
                GroupElement::Word(w) => prop_assert!(w.windows(2).all(|p| p[0] != -p[1])),
                other => prop_assert!(false, "unexpected element {:?}", other),
            }
        }
    }
}

#[test]
fn balls_are_nested_and_finite_balls_stabilize() {
    for g in common::all_groups() {
        let mut prev = g.ball(0, DEFAULT_CAP).unwrap();
        assert_eq!(prev, vec![g.identity()]);
        for r in 1..=4 {
            let next = g.ball(r, DEFAULT_CAP).unwrap();
            assert!(
                prev.iter().all(|x| next.contains(x)),
                "{} radius {r}",
                g.label()
            );
            prev = next;
        }
        if let (Some(d), Some(n)) = (g.diameter(), g.order()) {
            assert_eq!(g.ball(d, DEFAULT_CAP).unwrap().len(), n);
            assert!(d == 0 || g.ball(d - 1, DEFAULT_CAP).unwrap().len() < n);
        }
    }
}

#[test]
fn sphere_sizes_match_closed_forms() {
    // F₂: 1, 4, 12, 36, …; ℤ²: 1, 4, 8, 12, …
    assert_eq!(common::f2().sphere_sizes(4), vec![1, 4, 12, 36, 108]);
    assert_eq!(common::z2().sphere_sizes(4), vec![1, 4, 8, 12, 16]);
    let s3 = common::s3();
    assert_eq!(s3.sphere_sizes(3).iter().sum::<u128>(), 6);
}

#[test]
fn ball_cap_is_reported() {
    let err = common::f2().ball(12, 1000).unwrap_err();
    assert!(err.to_string().contains("cap"), "{err}");
}
