//! Seeded random chains, algebra elements and cochains.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{AlgebraElement, Chain, Tuple};
use crate::analysis::CochainSpec;
use crate::groups::{Group, GroupElement, GroupKind, WordLength};
use crate::scalar::Scalar;

/// Shape of random chains.
#[derive(Clone, Debug)]
pub struct ChainShape {
    pub degree: usize,
    pub terms: usize,
    /// Upper bound on the word length of each entry.
    pub max_length: WordLength,
    /// Coefficients are drawn from `[−coeff_range, coeff_range]`.
    pub coeff_range: i64,
    pub gaussian: bool,
    /// Chance that an entry (past the first) is replaced by `e`.
    pub unit_rate: f64,
}

impl ChainShape {
    pub fn new(degree: usize, terms: usize, max_length: WordLength) -> Self {
        ChainShape {
            degree,
            terms,
            max_length,
            coeff_range: 3,
            gaussian: false,
            unit_rate: 0.1,
        }
    }

    pub fn gaussian(mut self) -> Self {
        self.gaussian = true;
        self
    }
}

/// Uniform on finite groups, a random generator word elsewhere.
pub fn random_element<R: Rng + ?Sized>(
    group: &Group,
    rng: &mut R,
    max_length: WordLength,
) -> GroupElement {
    if group.kind() == GroupKind::FiniteTable {
        let n = group.order().expect("finite order");
        return GroupElement::Index(rng.gen_range(0..n as u32));
    }
    let len = rng.gen_range(0..=max_length);
    let gens = group.generators();
    let mut g = group.identity();
    for _ in 0..len {
        g = group.multiply(&g, gens.choose(rng).expect("generators"));
    }
    g
}

pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, range: i64, gaussian: bool) -> Scalar {
    let mut draw = || {
        let v = rng.gen_range(1..=range.max(1));
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    let re = draw();
    if gaussian {
        Scalar::gaussian(re, rng.gen_range(-range..=range))
    } else {
        Scalar::from_int(re)
    }
}

pub fn random_tuple<R: Rng + ?Sized>(group: &Group, rng: &mut R, shape: &ChainShape) -> Tuple {
    (0..=shape.degree)
        .map(|i| {
            if i > 0 && rng.gen_bool(shape.unit_rate) {
                group.identity()
            } else {
                random_element(group, rng, shape.max_length)
            }
        })
        .collect()
}

pub fn random_chain<R: Rng + ?Sized>(group: &Group, rng: &mut R, shape: &ChainShape) -> Chain {
    let mut x = Chain::zero(shape.degree);
    for _ in 0..shape.terms {
        let t = random_tuple(group, rng, shape);
        x.add_term(t, &random_scalar(rng, shape.coeff_range, shape.gaussian));
    }
    x
}

/// A nonzero chain; resamples on cancellation.
pub fn random_nonzero_chain<R: Rng + ?Sized>(
    group: &Group,
    rng: &mut R,
    shape: &ChainShape,
) -> Chain {
    loop {
        let x = random_chain(
            group,
            rng,
            &ChainShape {
                terms: shape.terms.max(1),
                ..shape.clone()
            },
        );
        if !x.is_zero() {
            return x;
        }
    }
}

/// A chain whose tuples all multiply to `e`.
pub fn random_homogeneous_chain<R: Rng + ?Sized>(
    group: &Group,
    rng: &mut R,
    shape: &ChainShape,
) -> Chain {
    let mut x = Chain::zero(shape.degree);
    for _ in 0..shape.terms {
        let mut t = random_tuple(group, rng, shape);
        t[0] = group.inverse(&group.product(&t[1..]));
        x.add_term(t, &random_scalar(rng, shape.coeff_range, shape.gaussian));
    }
    x
}

pub fn random_algebra_element<R: Rng + ?Sized>(
    group: &Group,
    rng: &mut R,
    terms: usize,
    max_length: WordLength,
    gaussian: bool,
) -> AlgebraElement {
    AlgebraElement::from_terms((0..terms).map(|_| {
        (
            random_element(group, rng, max_length),
            random_scalar(rng, 3, gaussian),
        )
    }))
}

/// A normalized finitely supported cochain as a reproducible table spec;
/// may hold fewer than `entries` entries when the ball is too small.
pub fn random_table_cochain<R: Rng + ?Sized>(
    group: &Group,
    rng: &mut R,
    arity: usize,
    entries: usize,
    max_length: WordLength,
) -> CochainSpec {
    let shape = ChainShape {
        unit_rate: 0.0,
        ..ChainShape::new(arity.saturating_sub(1), 0, max_length)
    };
    let mut table = std::collections::BTreeMap::new();
    for _ in 0..100 * entries.max(1) {
        if table.len() >= entries {
            break;
        }
        let t: Vec<GroupElement> = if arity == 0 {
            Vec::new()
        } else {
            random_tuple(group, rng, &shape)
        };
        if t.iter().any(|g| group.is_identity(g)) {
            continue;
        }
        table.insert(t, random_scalar(rng, 5, false));
        if arity == 0 {
            break;
        }
    }
    CochainSpec::Table {
        arity,
        entries: table
            .into_iter()
            .map(|(t, v)| {
                (
                    t.iter().map(|g| group.format_element(g)).collect(),
                    v.to_string(),
                )
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_chains_are_reproducible() {
        let f2 = Group::free(2).unwrap();
        let shape = ChainShape::new(2, 6, 3);
        let a = random_chain(&f2, &mut ChaCha8Rng::seed_from_u64(7), &shape);
        let b = random_chain(&f2, &mut ChaCha8Rng::seed_from_u64(7), &shape);
        assert_eq!(a, b);
        assert!(a.max_total_length(&f2) <= 9);
    }

    #[test]
    fn homogeneous_chains_multiply_to_e() {
        let s3 = Group::symmetric(3).unwrap();
        let x = random_homogeneous_chain(
            &s3,
            &mut ChaCha8Rng::seed_from_u64(1),
            &ChainShape::new(3, 10, 2),
        );
        assert!(x.terms().all(|(t, _)| s3.is_identity(&s3.product(t))));
    }

    #[test]
    fn table_cochains_are_normalized() {
        let z2 = Group::free_abelian(2).unwrap();
        let spec = random_table_cochain(&z2, &mut ChaCha8Rng::seed_from_u64(3), 2, 5, 2);
        let c = spec.build(&z2).unwrap();
        assert!(c.is_normalized());
        assert_eq!(c.arity(), 2);
    }
}
