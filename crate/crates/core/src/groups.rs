//! Finitely generated groups with a fixed symmetric generating set.
//!
//! Three realizations are supported: finite groups given by a full
//! multiplication table, free groups on named generators, and free abelian
//! groups `ℤ^k`. Every element has a unique canonical form, so equality of
//! [`GroupElement`]s is equality in the group.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word length with respect to the realization's generating set.
pub type WordLength = u64;

/// Default cap on ball and tuple enumerations.
pub const DEFAULT_CAP: usize = 200_000;

/// Canonical form of a group element.
///
/// Free-group letters are `±k` for the `k`-th generator (1-based), negative
/// meaning inverse; words are always freely reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Index(u32),
    Word(Vec<i32>),
    Vector(Vec<i64>),
}

/// Canonical representative of a conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClassId(pub GroupElement);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    FiniteTable,
    Free,
    FreeAbelian,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::FiniteTable => "finite-table",
            GroupKind::Free => "free",
            GroupKind::FreeAbelian => "free-abelian",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOp {
    Multiply,
    /// `g⁻¹h`
    InverseLeft,
}

#[derive(Clone, Debug)]
struct FiniteTable {
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    lengths: Vec<WordLength>,
    class_rep: Vec<u32>,
}

impl FiniteTable {
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }
}

#[derive(Clone, Debug)]
enum Realization {
    Finite(FiniteTable),
    Free { rank: usize },
    FreeAbelian { rank: usize },
}

/// An evaluable finitely generated group together with its word metric.
#[derive(Clone, Debug)]
pub struct Group {
    label: String,
    realization: Realization,
    names: Vec<String>,
    generators: Vec<GroupElement>,
}

impl Group {
    /// Builds a finite group from its multiplication table.
    ///
    /// `table[a][b]` is the index of `ab`. The generator list is closed under
    /// inverses; it must generate the whole group.
    pub fn finite_table(label: &str, table: Vec<Vec<usize>>, generators: &[usize]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidGroup("table too large".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if !is_permutation(row.iter().copied(), n) {
                return Err(Error::InvalidGroup(format!(
                    "row {i} is not a permutation (not a Latin square)"
                )));
            }
        }
        for j in 0..n {
            if !is_permutation(table.iter().map(|row| row[j]), n) {
                return Err(Error::InvalidGroup(format!(
                    "column {j} is not a permutation (not a Latin square)"
                )));
            }
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let mul = |a: usize, b: usize| flat[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        check_associative(n, &mul)?;
        let inverse: Vec<u32> = (0..n)
            .map(|x| (0..n).find(|&y| mul(x, y) == identity).unwrap() as u32)
            .collect();

        let mut gens = BTreeSet::new();
        for &g in generators {
            if g >= n {
                return Err(Error::InvalidGroup(format!("generator {g} out of range")));
            }
            gens.insert(g as u32);
            gens.insert(inverse[g]);
        }
        gens.remove(&(identity as u32));

        let mut lengths = vec![WordLength::MAX; n];
        lengths[identity] = 0;
        let mut queue = VecDeque::from([identity]);
        while let Some(g) = queue.pop_front() {
            for &s in &gens {
                let h = mul(g, s as usize);
                if lengths[h] == WordLength::MAX {
                    lengths[h] = lengths[g] + 1;
                    queue.push_back(h);
                }
            }
        }
        if lengths.contains(&WordLength::MAX) {
            return Err(Error::InvalidGroup(
                "generators do not generate the group".into(),
            ));
        }

        let class_rep = (0..n)
            .map(|g| {
                (0..n)
                    .map(|h| mul(mul(h, g), inverse[h] as usize) as u32)
                    .min()
                    .unwrap()
            })
            .collect();

        let ft = FiniteTable {
            order: n,
            table: flat,
            identity: identity as u32,
            inverse,
            lengths,
            class_rep,
        };
        Ok(Group {
            label: label.to_string(),
            realization: Realization::Finite(ft),
            names: Vec::new(),
            generators: gens.into_iter().map(GroupElement::Index).collect(),
        })
    }

    /// `ℤ/k` with generators `{t, t⁻¹}` where `t` is index 1.
    pub fn cyclic(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let table = (0..k)
            .map(|a| (0..k).map(|b| (a + b) % k).collect())
            .collect();
        let gens: &[usize] = if k == 1 { &[] } else { &[1] };
        Group::finite_table(&format!("Z/{k}"), table, gens)
    }

    /// The symmetric group `S_n` on permutations in lexicographic order,
    /// generated by adjacent transpositions.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::InvalidGroup(format!(
                "S_{n} not supported (1 ≤ n ≤ 6)"
            )));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
        // (στ)(i) = σ(τ(i))
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index(&t.iter().map(|&i| s[i]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        let gens: Vec<usize> = (0..n.saturating_sub(1))
            .map(|i| {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(i, i + 1);
                index(&p)
            })
            .collect();
        Group::finite_table(&format!("S{n}"), table, &gens)
    }

    /// Direct product of two finite-table groups; element `(a, b)` has index
    /// `a·|H| + b`.
    pub fn direct_product(g: &Group, h: &Group) -> Result<Self> {
        let (Realization::Finite(a), Realization::Finite(b)) = (&g.realization, &h.realization)
        else {
            return Err(Error::Unsupported(
                "direct product of non-finite groups".into(),
            ));
        };
        let (na, nb) = (a.order, b.order);
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| {
                        let p = a.mul((x / nb) as u32, (y / nb) as u32) as usize;
                        let q = b.mul((x % nb) as u32, (y % nb) as u32) as usize;
                        p * nb + q
                    })
                    .collect()
            })
            .collect();
        let mut gens = Vec::new();
        for s in g.generator_indices() {
            gens.push(s * nb + b.identity as usize);
        }
        for s in h.generator_indices() {
            gens.push(a.identity as usize * nb + s);
        }
        Group::finite_table(&format!("{}x{}", g.label, h.label), table, &gens)
    }

    /// `ℤ/2 × ℤ/2`.
    pub fn klein_four() -> Result<Self> {
        let z2 = Group::cyclic(2)?;
        Group::direct_product(&z2, &z2)
    }

    /// Free group on `rank` generators named `a, b, c, …`.
    pub fn free(rank: usize) -> Result<Self> {
        Group::free_named(&default_names(rank)?)
    }

    pub fn free_named(names: &[String]) -> Result<Self> {
        validate_names(names)?;
        let rank = names.len();
        Ok(Group {
            label: format!("F{rank}"),
            realization: Realization::Free { rank },
            names: names.to_vec(),
            generators: letters(rank).map(|x| GroupElement::Word(vec![x])).collect(),
        })
    }

    /// Free abelian group `ℤ^rank` on generators named `a, b, c, …`.
    pub fn free_abelian(rank: usize) -> Result<Self> {
        Group::free_abelian_named(&default_names(rank)?)
    }

    pub fn free_abelian_named(names: &[String]) -> Result<Self> {
        validate_names(names)?;
        let rank = names.len();
        let generators = letters(rank)
            .map(|x| {
                let mut v = vec![0; rank];
                v[x.unsigned_abs() as usize - 1] = x.signum() as i64;
                GroupElement::Vector(v)
            })
            .collect();
        Ok(Group {
            label: if rank == 1 {
                "Z".into()
            } else {
                format!("Z{rank}")
            },
            realization: Realization::FreeAbelian { rank },
            names: names.to_vec(),
            generators,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> GroupKind {
        match self.realization {
            Realization::Finite(_) => GroupKind::FiniteTable,
            Realization::Free { .. } => GroupKind::Free,
            Realization::FreeAbelian { .. } => GroupKind::FreeAbelian,
        }
    }

    /// Number of generators (before symmetrization) for free and free-abelian groups.
    pub fn rank(&self) -> Option<usize> {
        match self.realization {
            Realization::Finite(_) => None,
            Realization::Free { rank } | Realization::FreeAbelian { rank } => Some(rank),
        }
    }

    pub fn order(&self) -> Option<usize> {
        match &self.realization {
            Realization::Finite(t) => Some(t.order),
            _ => None,
        }
    }

    /// The symmetric generating set.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn generator_indices(&self) -> Vec<usize> {
        self.generators
            .iter()
            .filter_map(|g| match g {
                GroupElement::Index(i) => Some(*i as usize),
                _ => None,
            })
            .collect()
    }

    /// All elements of a finite group, by index.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        self.order()
            .map(|n| (0..n as u32).map(GroupElement::Index).collect())
    }

    /// Largest word length; finite groups only.
    pub fn diameter(&self) -> Option<WordLength> {
        match &self.realization {
            Realization::Finite(t) => t.lengths.iter().copied().max(),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.realization {
            Realization::Finite(t) => GroupElement::Index(t.identity),
            Realization::Free { .. } => GroupElement::Word(Vec::new()),
            Realization::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        match (g, &self.realization) {
            (GroupElement::Index(i), Realization::Finite(t)) => *i == t.identity,
            (GroupElement::Word(w), _) => w.is_empty(),
            (GroupElement::Vector(v), _) => v.iter().all(|&x| x == 0),
            _ => false,
        }
    }

    /// Checks that `g` is a canonical element of this realization.
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        let ok = match (g, &self.realization) {
            (GroupElement::Index(i), Realization::Finite(t)) => (*i as usize) < t.order,
            (GroupElement::Word(w), Realization::Free { rank }) => {
                w.iter()
                    .all(|&x| x != 0 && x.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupElement::Vector(v), Realization::FreeAbelian { rank }) => v.len() == *rank,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                element: format!("{g:?}"),
                kind: self.kind().name(),
            })
        }
    }

    /// Product `gh` of canonical elements of this group.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (g, h, &self.realization) {
            (GroupElement::Index(a), GroupElement::Index(b), Realization::Finite(t)) => {
                GroupElement::Index(t.mul(*a, *b))
            }
            (GroupElement::Word(a), GroupElement::Word(b), _) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                out.extend_from_slice(a);
                for &x in b {
                    if out.last() == Some(&-x) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                GroupElement::Word(out)
            }
            (GroupElement::Vector(a), GroupElement::Vector(b), _) => {
                GroupElement::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => panic!("mismatched group elements {g:?} and {h:?}"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match (g, &self.realization) {
            (GroupElement::Index(a), Realization::Finite(t)) => {
                GroupElement::Index(t.inverse[*a as usize])
            }
            (GroupElement::Word(w), _) => GroupElement::Word(w.iter().rev().map(|x| -x).collect()),
            (GroupElement::Vector(v), _) => GroupElement::Vector(v.iter().map(|x| -x).collect()),
            _ => panic!("element {g:?} does not belong to {}", self.label),
        }
    }

    /// Validated group arithmetic: `gh` or `g⁻¹h`.
    pub fn eval(&self, op: GroupOp, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(match op {
            GroupOp::Multiply => self.multiply(g, h),
            GroupOp::InverseLeft => self.multiply(&self.inverse(g), h),
        })
    }

    /// Ordered product `g₀g₁⋯gₙ`.
    pub fn product<'a>(
        &self,
        elements: impl IntoIterator<Item = &'a GroupElement>,
    ) -> GroupElement {
        elements
            .into_iter()
            .fold(self.identity(), |acc, g| self.multiply(&acc, g))
    }

    pub fn conjugate(&self, h: &GroupElement, g: &GroupElement) -> GroupElement {
        self.multiply(&self.multiply(h, g), &self.inverse(h))
    }

    pub fn word_length(&self, g: &GroupElement) -> WordLength {
        match (g, &self.realization) {
            (GroupElement::Index(a), Realization::Finite(t)) => t.lengths[*a as usize],
            (GroupElement::Word(w), _) => w.len() as WordLength,
            (GroupElement::Vector(v), _) => v.iter().map(|x| x.unsigned_abs()).sum(),
            _ => panic!("element {g:?} does not belong to {}", self.label),
        }
    }

    /// Sum of word lengths of the entries of a tuple.
    pub fn total_length(&self, tuple: &[GroupElement]) -> WordLength {
        tuple.iter().map(|g| self.word_length(g)).sum()
    }

    pub fn conjugacy_class_of(&self, g: &GroupElement) -> ConjClassId {
        match (g, &self.realization) {
            (GroupElement::Index(a), Realization::Finite(t)) => {
                ConjClassId(GroupElement::Index(t.class_rep[*a as usize]))
            }
            (GroupElement::Word(w), _) => {
                ConjClassId(GroupElement::Word(least_rotation(cyclically_reduce(w))))
            }
            (GroupElement::Vector(_), _) => ConjClassId(g.clone()),
            _ => panic!("element {g:?} does not belong to {}", self.label),
        }
    }

    /// Elements of word length at most `r`, sorted by `(length, canonical form)`.
    pub fn ball(&self, r: WordLength, cap: usize) -> Result<Vec<GroupElement>> {
        Ok(self
            .ball_with_lengths(r, cap)?
            .into_iter()
            .map(|(g, _)| g)
            .collect())
    }

    pub fn ball_with_lengths(
        &self,
        r: WordLength,
        cap: usize,
    ) -> Result<Vec<(GroupElement, WordLength)>> {
        let needed: u128 = self
            .sphere_sizes(r)
            .iter()
            .fold(0u128, |a, &s| a.saturating_add(s));
        if needed > cap as u128 {
            return Err(Error::ResourceCap {
                what: format!("ball of radius {r} in {}", self.label),
                needed,
                cap,
            });
        }
        let mut out: Vec<(GroupElement, WordLength)> = match &self.realization {
            Realization::Finite(t) => (0..t.order as u32)
                .filter(|&i| t.lengths[i as usize] <= r)
                .map(|i| (GroupElement::Index(i), t.lengths[i as usize]))
                .collect(),
            Realization::Free { rank } => {
                let mut out = vec![(GroupElement::Word(Vec::new()), 0)];
                let mut frontier = vec![Vec::<i32>::new()];
                for len in 1..=r {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for x in letters(*rank) {
                            if w.last() != Some(&-x) {
                                let mut v = w.clone();
                                v.push(x);
                                next.push(v);
                            }
                        }
                    }
                    out.extend(next.iter().map(|w| (GroupElement::Word(w.clone()), len)));
                    frontier = next;
                }
                out
            }
            Realization::FreeAbelian { rank } => {
                let mut out = Vec::new();
                let mut cur = vec![0i64; *rank];
                lattice_points(&mut cur, 0, r as i64, &mut out);
                out.into_iter()
                    .map(|v| {
                        let l = v.iter().map(|x| x.unsigned_abs()).sum();
                        (GroupElement::Vector(v), l)
                    })
                    .collect()
            }
        };
        out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        Ok(out)
    }

    /// `|S(ℓ)|` for `ℓ = 0..=r`, saturating.
    pub fn sphere_sizes(&self, r: WordLength) -> Vec<u128> {
        match &self.realization {
            Realization::Finite(t) => {
                let mut s = vec![0u128; r as usize + 1];
                for &l in &t.lengths {
                    if l <= r {
                        s[l as usize] += 1;
                    }
                }
                s
            }
            Realization::Free { rank } => {
                let k = 2 * *rank as u128;
                (0..=r)
                    .map(|l| match l {
                        0 => 1,
                        _ if k == 0 => 0,
                        _ => (1..l).fold(k, |a, _| a.saturating_mul(k - 1)),
                    })
                    .collect()
            }
            Realization::FreeAbelian { rank } => {
                // count[d][l]: vectors in ℤ^d with ℓ¹-norm exactly l
                let r = r as usize;
                let mut count = vec![0u128; r + 1];
                count[0] = 1;
                for _ in 0..*rank {
                    let mut next = vec![0u128; r + 1];
                    for (l, &c) in count.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        for a in 0..=(r - l) {
                            let mult = if a == 0 { 1 } else { 2 };
                            next[l + a] = next[l + a].saturating_add(c.saturating_mul(mult));
                        }
                    }
                    count = next;
                }
                count
            }
        }
    }

    /// All tuples `(g₁,…,g_arity)` with `Σ L(gᵢ) ≤ radius`, with their total length.
    pub fn tuples_within(
        &self,
        arity: usize,
        radius: WordLength,
        cap: usize,
    ) -> Result<Vec<(Vec<GroupElement>, WordLength)>> {
        let spheres = self.sphere_sizes(radius);
        // tuples[l] = number of arity-tuples with total length exactly l
        let mut counts = vec![0u128; spheres.len()];
        counts[0] = 1;
        for _ in 0..arity {
            let mut next = vec![0u128; spheres.len()];
            for (a, &ca) in counts.iter().enumerate() {
                for (b, &sb) in spheres.iter().enumerate().take(spheres.len() - a) {
                    next[a + b] = next[a + b].saturating_add(ca.saturating_mul(sb));
                }
            }
            counts = next;
        }
        let needed = counts.iter().fold(0u128, |a, &c| a.saturating_add(c));
        if needed > cap as u128 {
            return Err(Error::ResourceCap {
                what: format!(
                    "{arity}-tuples of total length ≤ {radius} in {}",
                    self.label
                ),
                needed,
                cap,
            });
        }
        let ball = self.ball_with_lengths(radius, cap)?;
        let mut out = Vec::with_capacity(needed as usize);
        let mut prefix = Vec::with_capacity(arity);
        extend_tuples(&ball, arity, radius, 0, &mut prefix, &mut out);
        Ok(out)
    }

    /// Generator names (empty for finite-table groups).
    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    /// Canonical text form: an index for finite groups, a space-separated
    /// word (capital letters for inverses) otherwise; `e` for the identity.
    pub fn format_element(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Index(i) => i.to_string(),
            GroupElement::Word(w) if w.is_empty() => "e".into(),
            GroupElement::Word(w) => w
                .iter()
                .map(|&x| self.letter_name(x))
                .collect::<Vec<_>>()
                .join(" "),
            GroupElement::Vector(v) => {
                let word: Vec<String> = v
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &x)| {
                        let letter = if x >= 0 {
                            i as i32 + 1
                        } else {
                            -(i as i32 + 1)
                        };
                        std::iter::repeat_n(self.letter_name(letter), x.unsigned_abs() as usize)
                    })
                    .collect();
                if word.is_empty() {
                    "e".into()
                } else {
                    word.join(" ")
                }
            }
        }
    }

    fn letter_name(&self, x: i32) -> String {
        let name = &self.names[x.unsigned_abs() as usize - 1];
        if x > 0 {
            name.clone()
        } else {
            name.to_uppercase()
        }
    }

    /// Parses the canonical text form (words need not be reduced).
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let bad = || Error::InvalidElement {
            element: s.to_string(),
            kind: self.kind().name(),
        };
        if let Realization::Finite(t) = &self.realization {
            if s == "e" {
                return Ok(GroupElement::Index(t.identity));
            }
            let i: u32 = s.parse().map_err(|_| bad())?;
            let g = GroupElement::Index(i);
            self.validate(&g).map_err(|_| bad())?;
            return Ok(g);
        }
        let tokens: Vec<String> = if s.is_empty() || s == "e" || s == "1" {
            Vec::new()
        } else if s.contains(char::is_whitespace) || !self.names.iter().all(|n| n.len() == 1) {
            s.split_whitespace().map(str::to_string).collect()
        } else {
            s.chars().map(|c| c.to_string()).collect()
        };
        let mut acc = self.identity();
        for tok in tokens {
            let letter = self
                .names
                .iter()
                .enumerate()
                .find_map(|(i, n)| {
                    if *n == tok {
                        Some(i as i32 + 1)
                    } else if n.to_uppercase() == tok {
                        Some(-(i as i32 + 1))
                    } else {
                        None
                    }
                })
                .ok_or_else(bad)?;
            let gen = match self.realization {
                Realization::Free { .. } => GroupElement::Word(vec![letter]),
                Realization::FreeAbelian { rank } => {
                    let mut v = vec![0; rank];
                    v[letter.unsigned_abs() as usize - 1] = letter.signum() as i64;
                    GroupElement::Vector(v)
                }
                Realization::Finite(_) => unreachable!(),
            };
            acc = self.multiply(&acc, &gen);
        }
        Ok(acc)
    }

    pub fn format_tuple(&self, tuple: &[GroupElement]) -> Vec<String> {
        tuple.iter().map(|g| self.format_element(g)).collect()
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label, self.kind().name())
    }
}

fn extend_tuples(
    ball: &[(GroupElement, WordLength)],
    arity: usize,
    budget: WordLength,
    used: WordLength,
    prefix: &mut Vec<GroupElement>,
    out: &mut Vec<(Vec<GroupElement>, WordLength)>,
) {
    if prefix.len() == arity {
        out.push((prefix.clone(), used));
        return;
    }
    for (g, l) in ball {
        if used + l > budget {
            break;
        }
        prefix.push(g.clone());
        extend_tuples(ball, arity, budget, used + l, prefix, out);
        prefix.pop();
    }
}

fn lattice_points(cur: &mut Vec<i64>, i: usize, budget: i64, out: &mut Vec<Vec<i64>>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for x in -budget..=budget {
        cur[i] = x;
        lattice_points(cur, i + 1, budget - x.abs(), out);
    }
    cur[i] = 0;
}

fn letters(rank: usize) -> impl Iterator<Item = i32> {
    (1..=rank as i32).flat_map(|k| [k, -k])
}

fn default_names(rank: usize) -> Result<Vec<String>> {
    // skip `e`, reserved for the identity
    let alphabet: Vec<char> = ('a'..='z').filter(|&c| c != 'e').collect();
    if rank > alphabet.len() {
        return Err(Error::InvalidGroup(format!(
            "rank {rank} needs explicit generator names"
        )));
    }
    Ok(alphabet[..rank].iter().map(|c| c.to_string()).collect())
}

fn validate_names(names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        let ok = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && n.chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
            && n != "e";
        if !ok {
            return Err(Error::InvalidGroup(format!(
                "generator name `{n}` must be lowercase alphanumeric and not `e`"
            )));
        }
        if !seen.insert(n.clone()) {
            return Err(Error::InvalidGroup(format!(
                "duplicate generator name `{n}`"
            )));
        }
    }
    Ok(())
}

fn is_permutation(row: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for x in row {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn check_associative(n: usize, mul: &impl Fn(usize, usize) -> usize) -> Result<()> {
    let fail = |a, b, c| {
        Err(Error::InvalidGroup(format!(
            "associativity fails at ({a}, {b}, {c})"
        )))
    };
    if n <= 128 {
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return fail(a, b, c);
                    }
                }
            }
        }
    } else {
        // Deterministic sample of triples for large tables.
        let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize % n
        };
        for _ in 0..500_000 {
            let (a, b, c) = (next(), next(), next());
            if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                return fail(a, b, c);
            }
        }
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cyclically_reduce(w: &[i32]) -> &[i32] {
    let (mut lo, mut hi) = (0, w.len());
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    &w[lo..hi]
}

fn least_rotation(w: &[i32]) -> Vec<i32> {
    (0..w.len().max(1))
        .map(|k| {
            w[k.min(w.len())..]
                .iter()
                .chain(&w[..k.min(w.len())])
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

/// Group specification document, deserialized from TOML.
///
/// ```toml
/// kind = "finite-table"
/// generators = [1]
/// table = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
/// ```
/// or `kind = "free"` / `kind = "free-abelian"` with `generators = ["a", "b"]`
/// (or just `rank = 2`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub kind: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub generators: Option<toml::Value>,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub table: Option<Vec<Vec<usize>>>,
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("group specification: {e}")))
    }

    pub fn build(&self) -> Result<Group> {
        match self.kind.as_str() {
            "finite-table" | "finite" => {
                let table = self.table.clone().ok_or_else(|| {
                    Error::InvalidGroup("finite-table group needs `table`".into())
                })?;
                let gens: Vec<usize> = match &self.generators {
                    Some(toml::Value::Array(a)) => a
                        .iter()
                        .map(|v| {
                            v.as_integer()
                                .filter(|&i| i >= 0)
                                .map(|i| i as usize)
                                .ok_or_else(|| {
                                    Error::InvalidGroup("generators must be element indices".into())
                                })
                        })
                        .collect::<Result<_>>()?,
                    None => {
                        return Err(Error::InvalidGroup(
                            "finite-table group needs `generators`".into(),
                        ))
                    }
                    Some(_) => return Err(Error::InvalidGroup("generators must be a list".into())),
                };
                Group::finite_table(self.label.as_deref().unwrap_or("G"), table, &gens)
            }
            kind @ ("free" | "free-abelian") => {
                let names: Vec<String> = match (&self.generators, self.rank) {
                    (Some(toml::Value::Array(a)), _) => a
                        .iter()
                        .map(|v| {
                            v.as_str().map(str::to_string).ok_or_else(|| {
                                Error::InvalidGroup("generator names must be strings".into())
                            })
                        })
                        .collect::<Result<_>>()?,
                    (None, Some(r)) => default_names(r)?,
                    _ => {
                        return Err(Error::InvalidGroup(format!(
                            "{kind} group needs `generators` or `rank`"
                        )))
                    }
                };
                if let Some(r) = self.rank {
                    if r != names.len() {
                        return Err(Error::InvalidGroup(
                            "rank disagrees with generator list".into(),
                        ));
                    }
                }
                let mut g = if kind == "free" {
                    Group::free_named(&names)?
                } else {
                    Group::free_abelian_named(&names)?
                };
                if let Some(l) = &self.label {
                    g.label = l.clone();
                }
                Ok(g)
            }
            other => Err(Error::InvalidGroup(format!("unknown group kind `{other}`"))),
        }
    }
}

/// Built-in groups by name: `Z/k`, `S3`, `S<n>`, `V4` (Klein four),
/// `Z`, `Z<k>`, `F<k>`.
pub fn builtin(name: &str) -> Result<Group> {
    let lower = name.to_ascii_lowercase();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::InvalidGroup(format!("unknown built-in group `{name}`")))
    };
    match lower.as_str() {
        "z" => Group::free_abelian(1),
        "v4" | "klein" | "z2xz2" | "z/2xz/2" => Group::klein_four(),
        s if s.starts_with("z/") => Group::cyclic(num(&s[2..])?),
        s if s.starts_with('s') => Group::symmetric(num(&s[1..])?),
        s if s.starts_with('f') => Group::free(num(&s[1..])?),
        s if s.starts_with('z') => Group::free_abelian(num(&s[1..])?),
        _ => Err(Error::InvalidGroup(format!(
            "unknown built-in group `{name}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bfs_lengths(g: &Group) -> Vec<WordLength> {
        // independent oracle: BFS over left multiplication by generators
        let n = g.order().unwrap();
        let mut dist = vec![u64::MAX; n];
        let e = match g.identity() {
            GroupElement::Index(i) => i as usize,
            _ => unreachable!(),
        };
        dist[e] = 0;
        let mut q = VecDeque::from([e]);
        while let Some(x) = q.pop_front() {
            for s in g.generators() {
                let GroupElement::Index(y) = g.multiply(s, &GroupElement::Index(x as u32)) else {
                    unreachable!()
                };
                if dist[y as usize] == u64::MAX {
                    dist[y as usize] = dist[x] + 1;
                    q.push_back(y as usize);
                }
            }
        }
        dist
    }

    #[test]
    fn group_eval_examples() {
        let z4 = Group::cyclic(4).unwrap();
        let t = GroupElement::Index(1);
        let t3 = GroupElement::Index(3);
        assert_eq!(z4.eval(GroupOp::Multiply, &t, &t3).unwrap(), z4.identity());

        let f2 = Group::free(2).unwrap();
        let ab = f2.parse_element("a b").unwrap();
        let b_inv = f2.parse_element("B").unwrap();
        assert_eq!(
            f2.eval(GroupOp::Multiply, &ab, &b_inv).unwrap(),
            f2.parse_element("a").unwrap()
        );

        let z2 = Group::free_abelian(2).unwrap();
        let x = z2.parse_element("a b").unwrap();
        let y = z2.parse_element("A").unwrap();
        assert_eq!(
            z2.eval(GroupOp::Multiply, &x, &y).unwrap(),
            z2.parse_element("b").unwrap()
        );
        assert_eq!(
            z2.eval(GroupOp::InverseLeft, &y, &x).unwrap(),
            z2.parse_element("a a b").unwrap()
        );

        assert!(f2.eval(GroupOp::Multiply, &t, &ab).is_err());
        assert!(f2.validate(&GroupElement::Word(vec![1, -1])).is_err());
        assert!(z4.validate(&GroupElement::Index(4)).is_err());
    }

    #[test]
    fn word_length_examples() {
        let f2 = Group::free(2).unwrap();
        assert_eq!(f2.word_length(&f2.parse_element("a b A").unwrap()), 3);
        for g in [
            Group::cyclic(4).unwrap(),
            f2,
            Group::free_abelian(3).unwrap(),
        ] {
            assert_eq!(g.word_length(&g.identity()), 0);
        }
        let z4 = Group::cyclic(4).unwrap();
        assert_eq!(z4.word_length(&GroupElement::Index(2)), 2);
    }

    #[test]
    fn finite_lengths_match_bfs_oracle() {
        for g in [
            Group::cyclic(4).unwrap(),
            Group::symmetric(3).unwrap(),
            Group::symmetric(4).unwrap(),
        ] {
            let oracle = bfs_lengths(&g);
            for (i, &l) in oracle.iter().enumerate() {
                assert_eq!(g.word_length(&GroupElement::Index(i as u32)), l);
            }
        }
        assert_eq!(Group::symmetric(3).unwrap().diameter(), Some(3));
    }

    #[test]
    fn ball_sizes() {
        let f2 = Group::free(2).unwrap();
        assert_eq!(f2.ball(1, DEFAULT_CAP).unwrap().len(), 5);
        assert_eq!(f2.ball(2, DEFAULT_CAP).unwrap().len(), 17);
        for r in 0..6 {
            // enumeration oracle: 1 + Σ 4·3^(ℓ-1)
            let expect = 1 + (1..=r).map(|l| 4 * 3usize.pow(l - 1)).sum::<usize>();
            assert_eq!(f2.ball(r as u64, DEFAULT_CAP).unwrap().len(), expect);
        }
        for g in [
            Group::cyclic(5).unwrap(),
            f2.clone(),
            Group::free_abelian(2).unwrap(),
        ] {
            assert_eq!(g.ball(0, DEFAULT_CAP).unwrap(), vec![g.identity()]);
        }
        let z2 = Group::free_abelian(2).unwrap();
        assert_eq!(z2.ball(2, DEFAULT_CAP).unwrap().len(), 13);
        assert!(matches!(
            f2.ball(20, DEFAULT_CAP),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn ball_is_sorted_nested_and_stabilizes() {
        let s3 = Group::symmetric(3).unwrap();
        let f2 = Group::free(2).unwrap();
        for g in [&s3, &f2] {
            for r in 0..4 {
                let b = g.ball_with_lengths(r, DEFAULT_CAP).unwrap();
                assert!(b.windows(2).all(|w| (w[0].1, &w[0].0) < (w[1].1, &w[1].0)));
                let bigger = g.ball(r + 1, DEFAULT_CAP).unwrap();
                assert!(b.iter().all(|(x, _)| bigger.contains(x)));
            }
        }
        assert_eq!(s3.ball(3, DEFAULT_CAP).unwrap().len(), 6);
        assert_eq!(s3.ball(10, DEFAULT_CAP).unwrap().len(), 6);
    }

    #[test]
    fn s3_conjugacy_classes_brute_force() {
        let s3 = Group::symmetric(3).unwrap();
        let elems = s3.elements().unwrap();
        let mut sizes = std::collections::BTreeMap::<ConjClassId, usize>::new();
        for g in &elems {
            *sizes.entry(s3.conjugacy_class_of(g)).or_default() += 1;
        }
        let mut v: Vec<usize> = sizes.values().copied().collect();
        v.sort();
        assert_eq!(v, vec![1, 2, 3]);
        // brute-force oracle: same id iff some h conjugates one to the other
        for g in &elems {
            for k in &elems {
                let conj = elems.iter().any(|h| &s3.conjugate(h, g) == k);
                assert_eq!(conj, s3.conjugacy_class_of(g) == s3.conjugacy_class_of(k));
            }
        }
    }

    #[test]
    fn free_conjugacy() {
        let f2 = Group::free(2).unwrap();
        let p = |s| f2.parse_element(s).unwrap();
        assert_eq!(
            f2.conjugacy_class_of(&p("a b A")),
            f2.conjugacy_class_of(&p("b"))
        );
        assert_eq!(
            f2.conjugacy_class_of(&p("a b")),
            f2.conjugacy_class_of(&p("b a"))
        );
        assert_ne!(
            f2.conjugacy_class_of(&p("a b")),
            f2.conjugacy_class_of(&p("a B"))
        );
        assert_eq!(f2.conjugacy_class_of(&p("e")).0, f2.identity());
        let z2 = Group::free_abelian(2).unwrap();
        let gz = z2.parse_element("a b").unwrap();
        assert_eq!(z2.conjugacy_class_of(&gz).0, gz);
    }

    #[test]
    fn klein_four_and_products() {
        let v4 = Group::klein_four().unwrap();
        assert_eq!(v4.order(), Some(4));
        let elems = v4.elements().unwrap();
        for g in &elems {
            assert_eq!(v4.multiply(g, g), v4.identity());
        }
    }

    #[test]
    fn table_validation() {
        assert!(Group::finite_table("bad", vec![vec![0, 1], vec![0, 1]], &[1]).is_err());
        assert!(Group::finite_table("bad", vec![vec![0, 1], vec![1]], &[1]).is_err());
        // Latin square that is not associative (a quasigroup with identity 0)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(Group::finite_table("loop", loop5, &[1]).is_err());
        // does not generate
        assert!(Group::finite_table(
            "z4",
            (0..4)
                .map(|a| (0..4).map(|b| (a + b) % 4).collect())
                .collect(),
            &[2]
        )
        .is_err());
    }

    #[test]
    fn group_spec_documents() {
        let doc = "kind = \"finite-table\"\nlabel = \"Z3\"\ngenerators = [1]\ntable = [[0,1,2],[1,2,0],[2,0,1]]\n";
        let g = GroupSpec::parse(doc).unwrap().build().unwrap();
        assert_eq!(g.order(), Some(3));
        assert_eq!(g.generators().len(), 2);
        let f = GroupSpec::parse("kind = \"free\"\ngenerators = [\"x\", \"y\"]")
            .unwrap()
            .build()
            .unwrap();
        let w = f.parse_element("x Y y y").unwrap();
        assert_eq!(f.format_element(&w), "x y");
        assert!(GroupSpec::parse("kind = \"free\"")
            .unwrap()
            .build()
            .is_err());
        assert!(GroupSpec::parse("kind = \"heap\"\nrank = 2")
            .unwrap()
            .build()
            .is_err());
    }

    #[test]
    fn element_text_forms() {
        let z2 = Group::free_abelian(2).unwrap();
        let g = z2.parse_element("b A b").unwrap();
        assert_eq!(z2.format_element(&g), "A b b");
        assert_eq!(z2.format_element(&z2.identity()), "e");
        let f2 = Group::free(2).unwrap();
        assert_eq!(
            f2.parse_element("abA").unwrap(),
            f2.parse_element("a b A").unwrap()
        );
        assert!(f2.parse_element("a c").is_err());
    }

    #[test]
    fn tuple_enumeration_counts() {
        let z = Group::free_abelian(1).unwrap();
        let pairs = z.tuples_within(2, 2, DEFAULT_CAP).unwrap();
        assert_eq!(pairs.len(), 13);
        assert!(pairs
            .iter()
            .all(|(t, l)| z.total_length(t) == *l && *l <= 2));
        let f2 = Group::free(2).unwrap();
        assert!(f2.tuples_within(3, 12, 1000).is_err());
    }

    #[test]
    fn builtins_by_name() {
        assert_eq!(builtin("Z/4").unwrap().order(), Some(4));
        assert_eq!(builtin("S3").unwrap().order(), Some(6));
        assert_eq!(builtin("V4").unwrap().order(), Some(4));
        assert_eq!(builtin("F2").unwrap().kind(), GroupKind::Free);
        assert_eq!(builtin("Z2").unwrap().rank(), Some(2));
        assert_eq!(builtin("Z").unwrap().rank(), Some(1));
        assert!(builtin("Q8").is_err());
    }
}
