//! The operators `b`, `B`, `τ` on `Ω*(ℂ[π])`, the conjugacy-class splitting
//! and finite truncations of the Hochschild, cyclic and `(b, B)` complexes.

pub mod linalg;
mod truncated;

pub use truncated::{
    build_truncated, truncated_homology, BasisLabel, HomologyResult, MatrixExport,
    TruncatedComplex, Variant,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{Chain, Tuple};
use crate::error::{Error, Result};
use crate::groups::{ConjClassId, Group, GroupElement};
use crate::scalar::Scalar;

/// Sign convention for the cyclic operator and the second sum of `B`.
///
/// `Standard` uses `τ(a₀,…,aₙ) = (−1)ⁿ(aₙ,a₀,…,aₙ₋₁)`, so `τ^{n+1} = id`, and
/// `B = (1−τ)sN`. `Paper` uses `(−1)^{n+1}` and `−Σ(−1)^{ni}(aᵢ,1,…)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Standard,
    Paper,
}

impl Convention {
    /// Sign of `τ` on degree-`n` chains.
    pub fn tau_sign(self, n: usize) -> i64 {
        let e = match self {
            Convention::Standard => n,
            Convention::Paper => n + 1,
        };
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn second_sum_sign(self) -> i64 {
        match self {
            Convention::Standard => 1,
            Convention::Paper => -1,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Standard => "standard",
            Convention::Paper => "paper",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Convention::Standard),
            "paper" => Ok(Convention::Paper),
            other => Err(Error::Parse(format!(
                "unknown convention `{other}` (expected paper|standard)"
            ))),
        }
    }
}

fn sign(parity: usize) -> Scalar {
    if parity.is_multiple_of(2) {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// `(a_i, …, a_n, a_0, …, a_{i−1})`
pub(crate) fn rotated(t: &[GroupElement], i: usize) -> Tuple {
    t[i..].iter().chain(&t[..i]).cloned().collect()
}

/// Hochschild boundary of a single tuple, written into `out`.
pub(crate) fn b_tuple(group: &Group, t: &[GroupElement], coeff: &Scalar, out: &mut Chain) {
    let n = t.len() - 1;
    let neg = -coeff;
    for i in 0..n {
        let mut face = Vec::with_capacity(n);
        face.extend_from_slice(&t[..i]);
        face.push(group.multiply(&t[i], &t[i + 1]));
        face.extend_from_slice(&t[i + 2..]);
        out.add_term(face, if i % 2 == 0 { coeff } else { &neg });
    }
    let mut last = Vec::with_capacity(n);
    last.push(group.multiply(&t[n], &t[0]));
    last.extend_from_slice(&t[1..n]);
    out.add_term(last, if n.is_multiple_of(2) { coeff } else { &neg });
}

/// `b(a₀,…,aₙ) = Σ_{i<n} (−1)^i (…, a_i a_{i+1}, …) + (−1)^n (a_n a₀, a₁, …, a_{n−1})`.
pub fn hochschild_b(group: &Group, x: &Chain) -> Result<Chain> {
    let n = x.degree();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let mut out = Chain::zero(n - 1);
    for (t, c) in x.terms() {
        b_tuple(group, t, c, &mut out);
    }
    Ok(out)
}

pub(crate) fn connes_b_tuple(
    group: &Group,
    t: &[GroupElement],
    coeff: &Scalar,
    convention: Convention,
    out: &mut Chain,
) {
    let n = t.len() - 1;
    let e = group.identity();
    let second = Scalar::from_int(convention.second_sum_sign());
    for i in 0..=n {
        let s = coeff * &sign(n * i);
        let rot = rotated(t, i);
        let mut first = Vec::with_capacity(n + 2);
        first.push(e.clone());
        first.extend_from_slice(&rot);
        out.add_term(first, &s);
        let mut other = Vec::with_capacity(n + 2);
        other.push(rot[0].clone());
        other.push(e.clone());
        other.extend_from_slice(&rot[1..]);
        out.add_term(other, &(&s * &second));
    }
}

/// Connes' operator, degree `n → n+1`.
pub fn connes_b(group: &Group, x: &Chain, convention: Convention) -> Chain {
    let mut out = Chain::zero(x.degree() + 1);
    for (t, c) in x.terms() {
        connes_b_tuple(group, t, c, convention, &mut out);
    }
    out
}

/// `τ(a₀,…,aₙ) = ±(aₙ,a₀,…,aₙ₋₁)`.
pub fn cyclic_tau(x: &Chain, convention: Convention) -> Chain {
    let n = x.degree();
    let s = Scalar::from_int(convention.tau_sign(n));
    let mut out = Chain::zero(n);
    for (t, c) in x.terms() {
        out.add_term(rotated(t, n), &(c * &s));
    }
    out
}

/// Drops every term with the unit in some position `≥ 1`.
pub fn normalize_chain(group: &Group, x: &Chain) -> Chain {
    let mut out = Chain::zero(x.degree());
    for (t, c) in x.terms() {
        if !t[1..].iter().any(|g| group.is_identity(g)) {
            out.add_term(t.clone(), c);
        }
    }
    out
}

/// Conjugacy class of `g₀g₁⋯gₙ`, the summand a tuple lies in.
pub fn tuple_class(group: &Group, t: &[GroupElement]) -> ConjClassId {
    group.conjugacy_class_of(&group.product(t))
}

/// Partition of `x` by the class of the tuple product.
pub fn conjugacy_split(group: &Group, x: &Chain) -> BTreeMap<ConjClassId, Chain> {
    let mut parts: BTreeMap<ConjClassId, Chain> = BTreeMap::new();
    for (t, c) in x.terms() {
        parts
            .entry(tuple_class(group, t))
            .or_insert_with(|| Chain::zero(x.degree()))
            .add_term(t.clone(), c);
    }
    parts
}

/// The `⟨e⟩` summand: terms whose tuple product is the identity.
pub fn homogeneous_part(group: &Group, x: &Chain) -> Chain {
    let mut out = Chain::zero(x.degree());
    for (t, c) in x.terms() {
        if group.is_identity(&group.product(t)) {
            out.add_term(t.clone(), c);
        }
    }
    out
}

/// Minimal rotation of `t` and the index `j` with `t = r^j(rep)`, where
/// `r(a₀,…,aₙ) = (aₙ,a₀,…,aₙ₋₁)`, together with the orbit size.
pub fn orbit_representative(t: &[GroupElement]) -> (Tuple, usize, usize) {
    let len = t.len();
    // r^m(t) = rotated(t, len − m)
    let mut best = t.to_vec();
    let mut best_m = 0;
    let mut size = len;
    for m in 1..len {
        let r = rotated(t, len - m);
        if r == t {
            size = m;
            break;
        }
        if r < best {
            best = r;
            best_m = m;
        }
    }
    let j = (size - best_m % size) % size;
    (best, j, size)
}

/// Coordinates of `x` in `Ω^n / (1−τ)Ω^n` on the basis of surviving orbit
/// representatives. An orbit of size `d` is killed when `σ^d = −1`.
pub fn cyclic_quotient_coords(x: &Chain, convention: Convention) -> BTreeMap<Tuple, Scalar> {
    let sigma = convention.tau_sign(x.degree());
    let mut out: BTreeMap<Tuple, Scalar> = BTreeMap::new();
    for (t, c) in x.terms() {
        let (rep, j, size) = orbit_representative(t);
        if sigma == -1 && size % 2 == 1 {
            continue;
        }
        let v = if sigma == -1 && j % 2 == 1 {
            -c
        } else {
            c.clone()
        };
        let slot = out.entry(rep).or_default();
        *slot += &v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Whether `b((1−τ)x)` vanishes in the cyclic quotient.
pub fn descends_on(group: &Group, x: &Chain, convention: Convention) -> Result<bool> {
    let y = x.minus(&cyclic_tau(x, convention))?;
    let by = hochschild_b(group, &y)?;
    Ok(cyclic_quotient_coords(&by, convention).is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitOperator {
    #[serde(rename = "b")]
    Hochschild,
    #[serde(rename = "B")]
    Connes,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitViolation {
    pub sample: usize,
    pub operator: SplitOperator,
    /// Class whose summand disagrees.
    pub class: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub samples: usize,
    pub checks: usize,
    pub violations: Vec<SplitViolation>,
}

/// First class `c` with `split(op x)[c] ≠ op(split(x)[c])`, if any.
fn commutes_with_split(
    group: &Group,
    x: &Chain,
    op: &dyn Fn(&Chain) -> Result<Chain>,
) -> Result<Option<ConjClassId>> {
    let whole = conjugacy_split(group, &op(x)?);
    let parts = conjugacy_split(group, x);
    for (class, part) in &parts {
        let image = op(part)?;
        let expected = whole.get(class);
        if (image.is_zero() && expected.is_some()) || (!image.is_zero() && expected != Some(&image))
        {
            return Ok(Some(class.clone()));
        }
    }
    Ok(whole.keys().find(|c| !parts.contains_key(*c)).cloned())
}

/// Checks `split∘b = b∘split` and `split∘B = B∘split` on each sample.
pub fn split_preservation_check(
    group: &Group,
    samples: &[Chain],
    convention: Convention,
) -> Result<SplitReport> {
    let mut report = SplitReport {
        samples: samples.len(),
        checks: 0,
        violations: Vec::new(),
    };
    for (i, x) in samples.iter().enumerate() {
        if x.degree() > 0 {
            report.checks += 1;
            if let Some(c) = commutes_with_split(group, x, &|y| hochschild_b(group, y))? {
                report.violations.push(SplitViolation {
                    sample: i,
                    operator: SplitOperator::Hochschild,
                    class: group.format_element(&c.0),
                });
            }
        }
        report.checks += 1;
        if let Some(c) = commutes_with_split(group, x, &|y| Ok(connes_b(group, y, convention)))? {
            report.violations.push(SplitViolation {
                sample: i,
                operator: SplitOperator::Connes,
                class: group.format_element(&c.0),
            });
        }
    }
    Ok(report)
}
