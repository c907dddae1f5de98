#![allow(dead_code)]

use cyclic_bench::groups::Group;
use cyclic_bench::scalar::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn z4() -> Group {
    Group::cyclic(4).unwrap()
}

pub fn s3() -> Group {
    Group::symmetric(3).unwrap()
}

pub fn v4() -> Group {
    Group::klein_four().unwrap()
}

pub fn f2() -> Group {
    Group::free(2).unwrap()
}

pub fn z2() -> Group {
    Group::free_abelian(2).unwrap()
}

pub fn all_groups() -> Vec<Group> {
    vec![z4(), s3(), v4(), f2(), z2()]
}

/// Rank of a dense matrix by textbook Gaussian elimination.
pub fn dense_rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        #[allow(clippy::needless_range_loop)]
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].checked_div(&pivot).unwrap();
                for k in c..cols {
                    let v = &rows[rank][k] * &f;
                    rows[r][k] -= &v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim ℂ[G]/[ℂ[G], ℂ[G]]` from the commutators `gh − hg`.
pub fn hh0_oracle(group: &Group) -> usize {
    let elems = group.elements().unwrap();
    let n = elems.len();
    let mut rows = Vec::new();
    for g in &elems {
        for h in &elems {
            let mut row = vec![Scalar::zero(); n];
            let (gh, hg) = (group.multiply(g, h), group.multiply(h, g));
            if gh != hg {
                let idx = |x: &cyclic_bench::groups::GroupElement| {
                    elems.iter().position(|e| e == x).unwrap()
                };
                row[idx(&gh)] = Scalar::one();
                row[idx(&hg)] = Scalar::from_int(-1);
                rows.push(row);
            }
        }
    }
    n - dense_rank(rows)
}
