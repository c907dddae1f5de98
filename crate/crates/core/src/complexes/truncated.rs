//! Finite stages: all basis tuples with total word length `Σ L(gᵢ) ≤ R`.
//!
//! `b`, `B` and `τ` never increase total length, so each truncation is a
//! genuine subcomplex (or a quotient of one). Matrices are block-diagonal by
//! the conjugacy class of the tuple product and ranks are taken per block.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{self, Echelon, SparseMatrix, SparseVec};
use super::{
    b_tuple, connes_b_tuple, cyclic_quotient_coords, cyclic_tau, orbit_representative, tuple_class,
    Convention,
};
use crate::algebra::{Chain, Tuple};
use crate::error::{Error, Result};
use crate::groups::{ConjClassId, Group, WordLength};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Variant {
    Hochschild,
    Normalized,
    CyclicQuotient,
    /// `TC_n = ⊕_{p≥0} Ω^{n−2p}` with differential `b + B`.
    ConnectiveTc,
    /// `T/F^k`: `Ω^0 … Ω^{k−2}` and `Ω^{k−1}/b(Ω^k)`, `ℤ/2`-graded.
    PeriodicQuotient {
        k: usize,
    },
}

impl Variant {
    fn is_periodic(self) -> bool {
        matches!(self, Variant::PeriodicQuotient { .. })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Hochschild => f.write_str("hochschild"),
            Variant::Normalized => f.write_str("normalized"),
            Variant::CyclicQuotient => f.write_str("cyclic-quotient"),
            Variant::ConnectiveTc => f.write_str("connective-tc"),
            Variant::PeriodicQuotient { k } => write!(f, "periodic-quotient({k})"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hochschild" => Variant::Hochschild,
            "normalized" => Variant::Normalized,
            "cyclic-quotient" => Variant::CyclicQuotient,
            "connective-tc" => Variant::ConnectiveTc,
            "periodic-quotient" => Variant::PeriodicQuotient { k: 3 },
            other => {
                let k = other
                    .strip_prefix("periodic-quotient(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|k| k.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown complex variant `{other}`")))?;
                Variant::PeriodicQuotient { k }
            }
        })
    }
}

/// A basis element: a tuple placed in a bicomplex column.
///
/// `column` is `p` for the connective complex, the form degree `q` for the
/// periodic quotient and `0` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub column: usize,
    pub tuple: Tuple,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyResult {
    pub variant: String,
    pub degree: usize,
    #[serde(rename = "R")]
    pub radius: WordLength,
    pub kernel_rank: usize,
    pub image_rank: usize,
    pub dim: usize,
}

/// Coordinate-format export of one boundary matrix.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixExport {
    pub source_degree: usize,
    pub target_degree: usize,
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, re, im)` with exact rational strings.
    pub entries: Vec<(usize, usize, String, String)>,
}

impl MatrixExport {
    /// One `row col re im` line per nonzero entry.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "% {} x {} from degree {} to {}\n",
            self.rows, self.cols, self.source_degree, self.target_degree
        );
        for (i, j, re, im) in &self.entries {
            s.push_str(&format!("{i} {j} {re} {im}\n"));
        }
        s
    }
}

#[derive(Debug)]
struct Space {
    basis: Vec<BasisLabel>,
    /// Block (conjugacy class) index of each basis element.
    block: Vec<usize>,
}

impl Space {
    fn index(&self) -> HashMap<&BasisLabel, usize> {
        self.basis.iter().enumerate().map(|(i, l)| (l, i)).collect()
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &b) in self.block.iter().enumerate() {
            by.entry(b).or_default().push(i);
        }
        by.into_values().collect()
    }
}

/// A finite stage of one of the complexes, with exact boundary matrices.
#[derive(Debug)]
pub struct TruncatedComplex {
    group: Group,
    variant: Variant,
    convention: Convention,
    radius: WordLength,
    n_max: usize,
    spaces: Vec<Space>,
    /// `maps[n]` is the differential out of `spaces[n]`; `None` for `d₀` of
    /// the ℤ-graded variants.
    maps: Vec<Option<SparseMatrix>>,
    ranks: Vec<OnceLock<usize>>,
    classes: Vec<ConjClassId>,
    is_complex: bool,
    descends: bool,
}

struct Blocks {
    ids: HashMap<ConjClassId, usize>,
    list: Vec<ConjClassId>,
}

impl Blocks {
    fn of(&mut self, group: &Group, t: &[crate::groups::GroupElement]) -> usize {
        let c = tuple_class(group, t);
        if let Some(&i) = self.ids.get(&c) {
            return i;
        }
        self.list.push(c.clone());
        self.ids.insert(c, self.list.len() - 1);
        self.list.len() - 1
    }
}

fn tuples(group: &Group, arity: usize, radius: WordLength, cap: usize) -> Result<Vec<Tuple>> {
    Ok(group
        .tuples_within(arity, radius, cap)?
        .into_iter()
        .map(|(t, _)| t)
        .collect())
}

fn chain_entries(c: &Chain, column: usize) -> impl Iterator<Item = (BasisLabel, Scalar)> + '_ {
    c.terms().map(move |(t, s)| {
        (
            BasisLabel {
                column,
                tuple: t.clone(),
            },
            s.clone(),
        )
    })
}

/// Assembles columns in parallel; every image label must lie in the target basis.
fn assemble<F>(source: &Space, target: &Space, image: F) -> Result<SparseMatrix>
where
    F: Fn(&BasisLabel) -> Vec<(BasisLabel, Scalar)> + Sync,
{
    let index = target.index();
    let columns: Result<Vec<SparseVec>> = source
        .basis
        .par_iter()
        .map(|l| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (label, s) in image(l) {
                let i = *index.get(&label).ok_or_else(|| {
                    Error::NotAComplex(format!(
                        "image term {:?} escapes the truncation",
                        label.tuple
                    ))
                })?;
                *acc.entry(i).or_default() += &s;
            }
            Ok(linalg::sparse_from_map(acc))
        })
        .collect();
    Ok(SparseMatrix::new(target.basis.len(), columns?))
}

/// Builds the finite stage `C_0 … C_{n_max}` of `variant` with radius `R`.
///
/// For the periodic quotient the two spaces are the even and odd parts and
/// `n_max` is ignored.
pub fn build_truncated(
    group: &Group,
    n_max: usize,
    radius: WordLength,
    variant: Variant,
    convention: Convention,
    cap: usize,
) -> Result<TruncatedComplex> {
    let mut blocks = Blocks {
        ids: HashMap::new(),
        list: Vec::new(),
    };
    let mut descends = true;
    let make_space = |labels: Vec<BasisLabel>, blocks: &mut Blocks| {
        let block = labels.iter().map(|l| blocks.of(group, &l.tuple)).collect();
        Space {
            basis: labels,
            block,
        }
    };
    let plain = |ts: Vec<Tuple>| {
        ts.into_iter()
            .map(|tuple| BasisLabel { column: 0, tuple })
            .collect::<Vec<_>>()
    };

    let (spaces, maps) = match variant {
        Variant::Hochschild | Variant::Normalized => {
            let normalized = variant == Variant::Normalized;
            let mut spaces = Vec::new();
            for n in 0..=n_max {
                let mut ts = tuples(group, n + 1, radius, cap)?;
                if normalized {
                    ts.retain(|t| !t[1..].iter().any(|g| group.is_identity(g)));
                }
                spaces.push(make_space(plain(ts), &mut blocks));
            }
            let mut maps = vec![None];
            for n in 1..=n_max {
                maps.push(Some(assemble(&spaces[n], &spaces[n - 1], |l| {
                    let mut out = Chain::zero(n - 1);
                    b_tuple(group, &l.tuple, &Scalar::one(), &mut out);
                    if normalized {
                        out = super::normalize_chain(group, &out);
                    }
                    chain_entries(&out, 0).collect()
                })?));
            }
            (spaces, maps)
        }
        Variant::CyclicQuotient => {
            let mut spaces = Vec::new();
            let mut all = Vec::new();
            for n in 0..=n_max {
                let ts = tuples(group, n + 1, radius, cap)?;
                let sigma = convention.tau_sign(n);
                let reps: Vec<Tuple> = ts
                    .iter()
                    .filter(|t| {
                        let (rep, _, size) = orbit_representative(t);
                        rep == **t && !(sigma == -1 && size % 2 == 1)
                    })
                    .cloned()
                    .collect();
                spaces.push(make_space(plain(reps), &mut blocks));
                all.push(ts);
            }
            let mut maps = vec![None];
            for n in 1..=n_max {
                let project = |t: &[crate::groups::GroupElement]| {
                    let mut out = Chain::zero(n - 1);
                    b_tuple(group, t, &Scalar::one(), &mut out);
                    cyclic_quotient_coords(&out, convention)
                };
                // b must kill (1−τ)Ω^n in the quotient for the matrix to be meaningful
                let ok = all[n].par_iter().all(|t| {
                    let x = Chain::from_terms(n, [(t.clone(), Scalar::one())]).expect("arity");
                    let y = x.minus(&cyclic_tau(&x, convention)).expect("degree");
                    let mut by = Chain::zero(n - 1);
                    for (u, c) in y.terms() {
                        b_tuple(group, u, c, &mut by);
                    }
                    cyclic_quotient_coords(&by, convention).is_empty()
                });
                descends &= ok;
                maps.push(Some(assemble(&spaces[n], &spaces[n - 1], |l| {
                    project(&l.tuple)
                        .into_iter()
                        .map(|(tuple, s)| (BasisLabel { column: 0, tuple }, s))
                        .collect()
                })?));
            }
            (spaces, maps)
        }
        Variant::ConnectiveTc => {
            let mut spaces = Vec::new();
            for n in 0..=n_max {
                let mut labels = Vec::new();
                for p in 0..=n / 2 {
                    let q = n - 2 * p;
                    for tuple in tuples(group, q + 1, radius, cap)? {
                        labels.push(BasisLabel { column: p, tuple });
                    }
                }
                spaces.push(make_space(labels, &mut blocks));
            }
            let mut maps = vec![None];
            for n in 1..=n_max {
                maps.push(Some(assemble(&spaces[n], &spaces[n - 1], |l| {
                    let q = l.tuple.len() - 1;
                    let mut out = Vec::new();
                    if q >= 1 {
                        let mut bx = Chain::zero(q - 1);
                        b_tuple(group, &l.tuple, &Scalar::one(), &mut bx);
                        out.extend(chain_entries(&bx, l.column));
                    }
                    if l.column >= 1 {
                        let mut bb = Chain::zero(q + 1);
                        connes_b_tuple(group, &l.tuple, &Scalar::one(), convention, &mut bb);
                        out.extend(chain_entries(&bb, l.column - 1));
                    }
                    out
                })?));
            }
            (spaces, maps)
        }
        Variant::PeriodicQuotient { k } => {
            if k < 1 {
                return Err(Error::InvalidParameter(
                    "periodic quotient needs k ≥ 1".into(),
                ));
            }
            let forms: Vec<Vec<Tuple>> = (0..k)
                .map(|q| tuples(group, q + 1, radius, cap))
                .collect::<Result<_>>()?;
            // b(Ω^k) inside Ω^{k−1}, reduced per block
            let top = k - 1;
            let top_index: HashMap<&Tuple, usize> =
                forms[top].iter().enumerate().map(|(i, t)| (t, i)).collect();
            let mut reducers: HashMap<usize, Echelon> = HashMap::new();
            for t in tuples(group, k + 1, radius, cap)? {
                let mut bx = Chain::zero(top);
                b_tuple(group, &t, &Scalar::one(), &mut bx);
                if bx.is_zero() {
                    continue;
                }
                let v: SparseVec = bx.terms().map(|(u, s)| (top_index[u], s.clone())).collect();
                let mut v = v;
                v.sort_by_key(|(i, _)| *i);
                reducers.entry(blocks.of(group, &t)).or_default().insert(&v);
            }
            let is_pivot = |t: &Tuple, block: usize| {
                reducers
                    .get(&block)
                    .is_some_and(|r| r.is_pivot(top_index[t]))
            };
            let mut parts: [Vec<BasisLabel>; 2] = [Vec::new(), Vec::new()];
            for (q, ts) in forms.iter().enumerate() {
                for t in ts {
                    if q == top && is_pivot(t, blocks.of(group, t)) {
                        continue;
                    }
                    parts[q % 2].push(BasisLabel {
                        column: q,
                        tuple: t.clone(),
                    });
                }
            }
            let [even, odd] = parts;
            let spaces = vec![make_space(even, &mut blocks), make_space(odd, &mut blocks)];
            let project_top = |bx: &Chain, block: usize| -> Vec<(BasisLabel, Scalar)> {
                let mut v: SparseVec = bx.terms().map(|(u, s)| (top_index[u], s.clone())).collect();
                v.sort_by_key(|(i, _)| *i);
                let reduced = match reducers.get(&block) {
                    Some(r) => r.reduce(&v),
                    None => v,
                };
                reduced
                    .into_iter()
                    .map(|(i, s)| {
                        (
                            BasisLabel {
                                column: top,
                                tuple: forms[top][i].clone(),
                            },
                            s,
                        )
                    })
                    .collect()
            };
            let image = |l: &BasisLabel| -> Vec<(BasisLabel, Scalar)> {
                let q = l.column;
                let block_of = |t: &[crate::groups::GroupElement]| {
                    let c = tuple_class(group, t);
                    blocks.ids.get(&c).copied()
                };
                let mut out = Vec::new();
                if q >= 1 {
                    let mut bx = Chain::zero(q - 1);
                    b_tuple(group, &l.tuple, &Scalar::one(), &mut bx);
                    out.extend(chain_entries(&bx, q - 1));
                }
                if q < top {
                    let mut bb = Chain::zero(q + 1);
                    connes_b_tuple(group, &l.tuple, &Scalar::one(), convention, &mut bb);
                    if q + 1 == top {
                        let block = block_of(&l.tuple).expect("known block");
                        out.extend(project_top(&bb, block));
                    } else {
                        out.extend(chain_entries(&bb, q + 1));
                    }
                }
                out
            };
            let d0 = assemble(&spaces[0], &spaces[1], image)?;
            let d1 = assemble(&spaces[1], &spaces[0], image)?;
            (spaces, vec![Some(d0), Some(d1)])
        }
    };

    let is_complex = if variant.is_periodic() {
        let (d0, d1) = (maps[0].as_ref().expect("d0"), maps[1].as_ref().expect("d1"));
        d1.composes_to_zero(d0) && d0.composes_to_zero(d1)
    } else {
        (2..=n_max).all(|n| {
            let (lo, hi) = (
                maps[n - 1].as_ref().expect("map"),
                maps[n].as_ref().expect("map"),
            );
            lo.composes_to_zero(hi)
        })
    };
    let ranks = (0..maps.len()).map(|_| OnceLock::new()).collect();
    Ok(TruncatedComplex {
        group: group.clone(),
        variant,
        convention,
        radius,
        n_max: if variant.is_periodic() { 1 } else { n_max },
        spaces,
        maps,
        ranks,
        classes: blocks.list,
        is_complex,
        descends,
    })
}

impl TruncatedComplex {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn radius(&self) -> WordLength {
        self.radius
    }

    /// Highest degree with a basis (1 for the periodic quotient).
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Whether every composite of consecutive differentials vanishes.
    pub fn is_complex(&self) -> bool {
        self.is_complex
    }

    /// For the cyclic quotient: whether `b` kills `(1−τ)` on this stage.
    pub fn descends(&self) -> bool {
        self.descends
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.spaces.get(degree).map_or(0, |s| s.basis.len())
    }

    pub fn basis(&self, degree: usize) -> &[BasisLabel] {
        self.spaces.get(degree).map_or(&[], |s| &s.basis)
    }

    /// Conjugacy class of each block index.
    pub fn classes(&self) -> &[ConjClassId] {
        &self.classes
    }

    /// Differential out of `degree`, with its target degree.
    pub fn differential(&self, degree: usize) -> Option<(&SparseMatrix, usize)> {
        let m = self.maps.get(degree)?.as_ref()?;
        Some((m, self.target(degree)))
    }

    fn target(&self, degree: usize) -> usize {
        if self.variant.is_periodic() {
            1 - degree
        } else {
            degree - 1
        }
    }

    fn rank(&self, degree: usize) -> usize {
        match self.maps.get(degree).and_then(Option::as_ref) {
            None => 0,
            Some(m) => *self.ranks[degree]
                .get_or_init(|| linalg::block_rank(m, &self.spaces[degree].blocks())),
        }
    }

    /// Degree whose differential lands in `degree`.
    fn incoming(&self, degree: usize) -> Result<usize> {
        if self.variant.is_periodic() {
            if degree > 1 {
                return Err(Error::DegreeOutOfRange {
                    degree,
                    available: "0 (even), 1 (odd)".into(),
                });
            }
            return Ok(1 - degree);
        }
        if degree >= self.n_max {
            return Err(Error::DegreeOutOfRange {
                degree,
                available: format!("0..{} (degree n needs C_(n+1))", self.n_max),
            });
        }
        Ok(degree + 1)
    }

    fn usable(&self) -> Result<()> {
        if !self.is_complex {
            return Err(Error::NotAComplex(format!(
                "{} under the {} convention has d∘d ≠ 0",
                self.variant, self.convention
            )));
        }
        if !self.descends {
            return Err(Error::NotAComplex(format!(
                "b does not descend to the cyclic quotient under the {} convention",
                self.convention
            )));
        }
        Ok(())
    }

    pub fn homology(&self, degree: usize) -> Result<HomologyResult> {
        let incoming = self.incoming(degree)?;
        self.usable()?;
        let kernel_rank = self.dim(degree) - self.rank(degree);
        let image_rank = self.rank(incoming);
        Ok(HomologyResult {
            variant: self.variant.to_string(),
            degree,
            radius: self.radius,
            kernel_rank,
            image_rank,
            dim: kernel_rank - image_rank,
        })
    }

    /// Cycles whose classes form a basis of the homology in `degree`, as
    /// coordinate vectors on [`TruncatedComplex::basis`].
    pub fn cycle_representatives(&self, degree: usize) -> Result<Vec<SparseVec>> {
        let incoming = self.incoming(degree)?;
        self.usable()?;
        let space = &self.spaces[degree];
        let mut by_block: BTreeMap<usize, (Vec<SparseVec>, Vec<SparseVec>)> = BTreeMap::new();
        for cols in space.blocks() {
            let b = space.block[cols[0]];
            let cycles = match self.maps[degree].as_ref() {
                Some(m) => linalg::kernel_basis(m, &cols),
                None => cols.iter().map(|&j| vec![(j, Scalar::one())]).collect(),
            };
            by_block.entry(b).or_default().1 = cycles;
        }
        if let Some(m) = self.maps[incoming].as_ref() {
            for (j, col) in m.columns.iter().enumerate() {
                if !col.is_empty() {
                    let b = self.spaces[incoming].block[j];
                    by_block.entry(b).or_default().0.push(col.clone());
                }
            }
        }
        Ok(by_block
            .into_par_iter()
            .flat_map(|(_, (bounds, cycles))| linalg::complement_representatives(&bounds, &cycles))
            .collect())
    }

    /// Converts coordinates to a chain, for variants whose basis is plain tuples.
    pub fn to_chain(&self, degree: usize, coords: &[(usize, Scalar)]) -> Option<Chain> {
        if matches!(
            self.variant,
            Variant::ConnectiveTc | Variant::PeriodicQuotient { .. }
        ) {
            return None;
        }
        let basis = self.basis(degree);
        Chain::from_terms(
            degree,
            coords
                .iter()
                .map(|(i, s)| (basis[*i].tuple.clone(), s.clone())),
        )
        .ok()
    }

    /// Basis listing, one `column<TAB>g₀ | g₁ | …` line per element.
    pub fn export_basis(&self, degree: usize) -> Vec<String> {
        self.basis(degree)
            .iter()
            .map(|l| {
                format!(
                    "{}\t{}",
                    l.column,
                    self.group.format_tuple(&l.tuple).join(" | ")
                )
            })
            .collect()
    }

    pub fn export_matrix(&self, degree: usize) -> Option<MatrixExport> {
        let (m, target) = self.differential(degree)?;
        Some(MatrixExport {
            source_degree: degree,
            target_degree: target,
            rows: m.rows,
            cols: m.cols,
            entries: m
                .triples()
                .map(|(i, j, s)| (i, j, s.re().to_string(), s.im().to_string()))
                .collect(),
        })
    }
}

/// `H_degree` of a finite stage.
pub fn truncated_homology(cx: &TruncatedComplex, degree: usize) -> Result<HomologyResult> {
    cx.homology(degree)
}
