//! Finitely supported elements of `ℂ[π]` and of `Ω^n(ℂ[π]) = ℂ[π]^{⊗(n+1)}`.
//!
//! Coefficients are exact Gaussian rationals. Chains are stored on the basis of
//! elementary tensors `(g₀, …, gₙ)` of group elements.

mod norms;

pub use norms::{
    amax_seminorm, check_unconditional, nu_lambda, reduced_norm, reduced_norm_with,
    ReducedNormOptions, SeminormKind, UnconditionalReport, UnconditionalViolation,
};

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement, WordLength};
use crate::scalar::Scalar;

/// An elementary tensor `(g₀, g₁, …, gₙ)`.
pub type Tuple = Vec<GroupElement>;

fn accumulate<K: Ord>(terms: &mut BTreeMap<K, Scalar>, key: K, coeff: &Scalar) {
    if coeff.is_zero() {
        return;
    }
    match terms.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += coeff;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// `Σ λ_g g ∈ ℂ[π]`, finitely supported, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraElement {
    terms: BTreeMap<GroupElement, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `δ_g`.
    pub fn delta(g: GroupElement) -> Self {
        Self::monomial(g, Scalar::one())
    }

    pub fn monomial(g: GroupElement, coeff: Scalar) -> Self {
        let mut x = Self::zero();
        x.add_term(g, &coeff);
        x
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, Scalar)>) -> Self {
        let mut x = Self::zero();
        for (g, c) in terms {
            x.add_term(g, &c);
        }
        x
    }

    pub fn add_term(&mut self, g: GroupElement, coeff: &Scalar) {
        accumulate(&mut self.terms, g, coeff);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &GroupElement) -> Scalar {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c);
        }
        out
    }

    pub fn scaled(&self, s: &Scalar) -> AlgebraElement {
        AlgebraElement::from_terms(self.terms.iter().map(|(g, c)| (g.clone(), c * s)))
    }

    /// Coefficientwise modulus `Σ |λ_g| g`, when every modulus is rational.
    pub fn abs_coefficients(&self) -> Option<AlgebraElement> {
        let mut out = AlgebraElement::zero();
        for (g, c) in &self.terms {
            let m = c.abs();
            out.add_term(g.clone(), &Scalar::real(m.as_exact()?.clone()));
        }
        Some(out)
    }

    pub fn validate(&self, group: &Group) -> Result<()> {
        self.terms.keys().try_for_each(|g| group.validate(g))
    }
}

/// Product in `ℂ[π]`: `(Σ λ_g g)(Σ μ_h h) = Σ λ_g μ_h (gh)`.
pub fn convolve(group: &Group, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (g, a) in &x.terms {
        for (h, b) in &y.terms {
            out.add_term(group.multiply(g, h), &(a * b));
        }
    }
    out
}

/// A degree-`n` chain `Σ γ_i (g₀ᵢ, …, gₙᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<Tuple, Scalar>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn elementary(tuple: Tuple, coeff: Scalar) -> Result<Self> {
        if tuple.is_empty() {
            return Err(Error::InvalidParameter(
                "elementary tensor needs at least one entry".into(),
            ));
        }
        let mut c = Chain::zero(tuple.len() - 1);
        c.add_term(tuple, &coeff);
        Ok(c)
    }

    pub fn from_terms(
        degree: usize,
        terms: impl IntoIterator<Item = (Tuple, Scalar)>,
    ) -> Result<Self> {
        let mut c = Chain::zero(degree);
        for (t, s) in terms {
            c.try_add_term(t, &s)?;
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Adds `coeff · tuple`; the tuple must have `degree + 1` entries.
    pub fn add_term(&mut self, tuple: Tuple, coeff: &Scalar) {
        assert_eq!(
            tuple.len(),
            self.degree + 1,
            "tuple length does not match chain degree"
        );
        accumulate(&mut self.terms, tuple, coeff);
    }

    pub fn try_add_term(&mut self, tuple: Tuple, coeff: &Scalar) -> Result<()> {
        if tuple.len() != self.degree + 1 {
            return Err(Error::DegreeMismatch {
                expected: self.degree + 1,
                found: tuple.len(),
            });
        }
        accumulate(&mut self.terms, tuple, coeff);
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tuple, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, tuple: &[GroupElement]) -> Scalar {
        self.terms.get(tuple).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        if other.degree != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            accumulate(&mut out.terms, t.clone(), c);
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Chain) -> Result<Chain> {
        self.plus(&other.scaled(&Scalar::from_int(-1)))
    }

    pub fn scaled(&self, s: &Scalar) -> Chain {
        let mut out = Chain::zero(self.degree);
        for (t, c) in &self.terms {
            out.add_term(t.clone(), &(c * s));
        }
        out
    }

    /// Largest `Σ L(gᵢ)` over the support (0 for the zero chain).
    pub fn max_total_length(&self, group: &Group) -> WordLength {
        self.terms
            .keys()
            .map(|t| group.total_length(t))
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self, group: &Group) -> Result<()> {
        self.terms
            .keys()
            .flatten()
            .try_for_each(|g| group.validate(g))
    }
}

/// `λ^L` as an exact rational.
pub(crate) fn weight_power(lambda: &BigRational, length: WordLength) -> BigRational {
    num_traits::pow(lambda.clone(), length as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Group;

    #[test]
    fn convolve_examples() {
        let z2 = Group::cyclic(2).unwrap();
        let (e, t) = (z2.identity(), GroupElement::Index(1));
        let x =
            AlgebraElement::from_terms([(e.clone(), Scalar::one()), (t.clone(), Scalar::one())]);
        let y = AlgebraElement::from_terms([(e, Scalar::one()), (t, Scalar::from_int(-1))]);
        assert!(convolve(&z2, &x, &y).is_empty());

        let f2 = Group::free(2).unwrap();
        let p = |s| f2.parse_element(s).unwrap();
        let ab = convolve(
            &f2,
            &AlgebraElement::delta(p("a")),
            &AlgebraElement::delta(p("b")),
        );
        assert_eq!(ab, AlgebraElement::delta(p("a b")));

        // term-by-term oracle: (2a + 3b)·a⁻¹ = 2e + 3ba⁻¹
        let x = AlgebraElement::from_terms([
            (p("a"), Scalar::from_int(2)),
            (p("b"), Scalar::from_int(3)),
        ]);
        let got = convolve(&f2, &x, &AlgebraElement::delta(p("A")));
        let want = AlgebraElement::from_terms([
            (p("e"), Scalar::from_int(2)),
            (p("b A"), Scalar::from_int(3)),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn chain_bookkeeping() {
        let f2 = Group::free(2).unwrap();
        let p = |s| f2.parse_element(s).unwrap();
        let mut c = Chain::zero(1);
        c.add_term(vec![p("a"), p("b")], &Scalar::from_int(2));
        c.add_term(vec![p("a"), p("b")], &Scalar::from_int(-2));
        assert!(c.is_zero());
        assert!(c.try_add_term(vec![p("a")], &Scalar::one()).is_err());
        let x = Chain::elementary(vec![p("a b"), p("A")], Scalar::one()).unwrap();
        assert_eq!(x.max_total_length(&f2), 3);
        assert!(x.minus(&x).unwrap().is_zero());
        assert!(x.plus(&Chain::zero(2)).is_err());
    }

    #[test]
    fn abs_coefficients_needs_rational_moduli() {
        let z = Group::free_abelian(1).unwrap();
        let x = AlgebraElement::from_terms([
            (z.identity(), Scalar::gaussian(3, 4)),
            (z.parse_element("a").unwrap(), Scalar::from_int(-2)),
        ]);
        let ax = x.abs_coefficients().unwrap();
        assert_eq!(ax.coefficient(&z.identity()), Scalar::from_int(5));
        assert_eq!(
            ax.coefficient(&z.parse_element("a").unwrap()),
            Scalar::from_int(2)
        );
        let y = AlgebraElement::monomial(z.identity(), Scalar::gaussian(1, 1));
        assert!(y.abs_coefficients().is_none());
    }
}
