//! Exact sparse linear algebra over `ℚ(i)`.
//!
//! Ranks use fraction-free elimination over the Gaussian integers: each
//! vector is cleared of denominators and rows are kept primitive by dividing
//! out the integer content. Kernels and quotient projections use a reduced
//! echelon form over [`Scalar`].

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::scalar::{denominator_lcm, Scalar};

/// Sparse vector, sorted by index, no zero entries.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Column-major sparse matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(rows: usize, columns: Vec<SparseVec>) -> Self {
        SparseMatrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `self · v`.
    pub fn apply(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (j, a) in v {
            for (i, m) in &self.columns[*j] {
                *acc.entry(*i).or_default() += &(m * a);
            }
        }
        acc.into_iter().filter(|(_, s)| !s.is_zero()).collect()
    }

    /// Whether `self · other = 0`.
    pub fn composes_to_zero(&self, other: &SparseMatrix) -> bool {
        other.columns.par_iter().all(|c| self.apply(c).is_empty())
    }

    /// `(row, col, entry)` triples in column order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, s)| (*i, j, s)))
    }
}

pub fn sparse_from_map(map: BTreeMap<usize, Scalar>) -> SparseVec {
    map.into_iter().filter(|(_, s)| !s.is_zero()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

type IntVec = Vec<(usize, GaussInt)>;

fn to_integral(v: &[(usize, Scalar)]) -> IntVec {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, (_, s)| acc.lcm(&denominator_lcm(s)));
    let l = BigRational::from_integer(lcm);
    let out = v
        .iter()
        .map(|(i, s)| {
            let (re, im) = (s.re() * &l, s.im() * &l);
            (
                *i,
                GaussInt {
                    re: re.to_integer(),
                    im: im.to_integer(),
                },
            )
        })
        .collect();
    primitive(out)
}

fn primitive(mut v: IntVec) -> IntVec {
    let mut g = BigInt::zero();
    for (_, x) in &v {
        g = g.gcd(&x.re).gcd(&x.im);
        if g.is_one() {
            return v;
        }
    }
    if g > BigInt::one() {
        for (_, x) in v.iter_mut() {
            x.re /= &g;
            x.im /= &g;
        }
    }
    v
}

/// `a·v − b·p`; both share their leading index, which cancels.
fn eliminate(v: &IntVec, p: &IntVec) -> IntVec {
    let (a, b) = (&p[0].1, &v[0].1);
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (1, 1);
    while i < v.len() || j < p.len() {
        let next = match (v.get(i), p.get(j)) {
            (Some((ci, x)), Some((cj, y))) if ci == cj => {
                i += 1;
                j += 1;
                (*ci, a.mul(x).sub(&b.mul(y)))
            }
            (Some((ci, x)), Some((cj, _))) if ci < cj => {
                i += 1;
                (*ci, a.mul(x))
            }
            (Some((ci, x)), None) => {
                i += 1;
                (*ci, a.mul(x))
            }
            (_, Some((cj, y))) => {
                j += 1;
                let zero = GaussInt {
                    re: BigInt::zero(),
                    im: BigInt::zero(),
                };
                (*cj, zero.sub(&b.mul(y)))
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    primitive(out)
}

/// Rank of a family of sparse vectors.
pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut pivots: HashMap<usize, IntVec> = HashMap::new();
    for v in vectors {
        let mut v = to_integral(v);
        while let Some((lead, _)) = v.first() {
            match pivots.get(lead) {
                Some(p) => v = eliminate(&v, p),
                None => {
                    pivots.insert(*lead, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Rank of a matrix whose columns split into independent blocks, the
/// columns of each block having row support disjoint from other blocks.
pub fn block_rank(m: &SparseMatrix, blocks: &[Vec<usize>]) -> usize {
    blocks
        .par_iter()
        .map(|cols| {
            let vs: Vec<SparseVec> = cols.iter().map(|&j| m.columns[j].clone()).collect();
            rank(&vs)
        })
        .sum()
}

/// Reduced echelon form over `ℚ(i)`, with unit leading coefficients.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
        let mut cursor = 0;
        while let Some((&col, _)) = acc.range(cursor..).next() {
            cursor = col + 1;
            if let Some(row) = self.rows.get(&col) {
                let c = acc.remove(&col).expect("present");
                for (i, r) in &row[1..] {
                    let slot = acc.entry(*i).or_default();
                    *slot -= &(&c * r);
                }
            }
        }
        sparse_from_map(acc)
    }

    /// Adds `v` to the row space; returns its new pivot, or `None` if `v`
    /// was already in the span.
    pub fn insert(&mut self, v: &[(usize, Scalar)]) -> Option<usize> {
        let r = self.reduce(v);
        let (lead, c) = r.first()?.clone();
        let inv = Scalar::one().checked_div(&c).expect("nonzero pivot");
        let row: SparseVec = r.iter().map(|(i, s)| (*i, s * &inv)).collect();
        // keep the form reduced: clear `lead` from earlier rows
        for other in self.rows.values_mut() {
            if let Some(pos) = other.iter().position(|(i, _)| *i == lead) {
                let f = other[pos].1.clone();
                let mut acc: BTreeMap<usize, Scalar> = other.drain(..).collect();
                for (i, s) in &row {
                    *acc.entry(*i).or_default() -= &(&f * s);
                }
                *other = sparse_from_map(acc);
            }
        }
        self.rows.insert(lead, row);
        Some(lead)
    }
}

/// Basis of `ker m` restricted to the given domain columns.
pub fn kernel_basis(m: &SparseMatrix, cols: &[usize]) -> Vec<SparseVec> {
    // columns tagged by an identity block placed after all rows
    let offset = m.rows;
    let mut ech = Echelon::new();
    let mut kernel = Vec::new();
    for &j in cols {
        let mut v = m.columns[j].clone();
        v.push((offset + j, Scalar::one()));
        let r = ech.reduce(&v);
        match r.first() {
            Some((lead, _)) if *lead >= offset => {
                kernel.push(r.iter().map(|(i, s)| (i - offset, s.clone())).collect());
            }
            _ => {
                ech.insert(&r);
            }
        }
    }
    kernel
}

/// Vectors among `cycles` completing `boundaries` to a basis of their span:
/// representatives of a basis of `span(cycles) / span(boundaries)`.
pub fn complement_representatives(
    boundaries: &[SparseVec],
    cycles: &[SparseVec],
) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    for b in boundaries {
        ech.insert(b);
    }
    cycles
        .iter()
        .filter(|z| ech.insert(z).is_some())
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries
            .iter()
            .map(|&(i, c)| (i, Scalar::from_int(c)))
            .collect()
    }

    /// Independent dense oracle: rank by floating point Gram–Schmidt on
    /// small integer matrices.
    fn dense_rank(vs: &[SparseVec], n: usize) -> usize {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for x in vs {
            let mut d = vec![0.0; n];
            for (i, s) in x {
                d[*i] = num_traits::ToPrimitive::to_f64(s.re()).unwrap();
            }
            for b in &basis {
                let dot: f64 = d.iter().zip(b).map(|(a, c)| a * c).sum();
                for (a, c) in d.iter_mut().zip(b) {
                    *a -= dot * c;
                }
            }
            let norm = d.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-9 {
                basis.push(d.iter().map(|a| a / norm).collect());
            }
        }
        basis.len()
    }

    #[test]
    fn rank_matches_dense_oracle() {
        let cases = vec![
            vec![
                v(&[(0, 1), (1, -1)]),
                v(&[(1, 1), (2, -1)]),
                v(&[(0, 1), (2, -1)]),
            ],
            vec![v(&[(0, 2), (3, 4)]), v(&[(0, 1), (3, 2)]), v(&[(1, 5)])],
            vec![v(&[]), v(&[(2, 7)])],
        ];
        for vs in cases {
            assert_eq!(rank(&vs), dense_rank(&vs, 4));
        }
    }

    #[test]
    fn gaussian_rank() {
        // (1, i) and (i, −1) are dependent over ℚ(i)
        let a = vec![(0, Scalar::one()), (1, Scalar::i())];
        let b = vec![(0, Scalar::i()), (1, Scalar::from_int(-1))];
        assert_eq!(rank(&[a.clone(), b]), 1);
        let c = vec![(0, Scalar::from_ratio(1, 3)), (1, Scalar::from_ratio(1, 2))];
        assert_eq!(rank(&[a, c]), 2);
    }

    #[test]
    fn kernel_and_quotient() {
        // d: e0 ↦ f0 − f1, e1 ↦ f1 − f2, e2 ↦ f0 − f2
        let m = SparseMatrix::new(
            3,
            vec![
                v(&[(0, 1), (1, -1)]),
                v(&[(1, 1), (2, -1)]),
                v(&[(0, 1), (2, -1)]),
            ],
        );
        let k = kernel_basis(&m, &[0, 1, 2]);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
        let reps = complement_representatives(&[v(&[(0, 1), (1, 1), (2, -1)])], &k);
        assert!(reps.is_empty());

        let mut ech = Echelon::new();
        ech.insert(&v(&[(0, 1), (1, -1)]));
        assert_eq!(ech.reduce(&v(&[(0, 1)])), v(&[(1, 1)]));
        assert!(ech.insert(&v(&[(0, 2), (1, -2)])).is_none());
        assert_eq!(block_rank(&m, &[vec![0, 1, 2]]), 2);
        let split = SparseMatrix::new(
            4,
            vec![
                v(&[(0, 1), (1, -1)]),
                v(&[(2, 1)]),
                v(&[(0, 2), (1, -2)]),
                v(&[(3, 1)]),
            ],
        );
        assert_eq!(block_rank(&split, &[vec![0, 2], vec![1, 3]]), 3);
    }
}
