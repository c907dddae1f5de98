//! Inhomogeneous bar cochains `φ: πⁿ → ℂ`, their coboundary, growth fits and
//! the `η_{N,m}` seminorms.

mod eta;
mod growth;

pub use eta::{boundedness_check, eta_seminorm, BoundedOp, BoundednessReport, EtaParams};
pub use growth::{
    fitted_constant, growth_fit, GrowthClass, GrowthOptions, GrowthReport, GrowthRow,
};

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement, GroupKind, WordLength};
use crate::scalar::{parse_rational, Scalar};

type Evaluator = Arc<dyn Fn(&[GroupElement]) -> Scalar + Send + Sync>;

/// `|φ(g₁,…,gₙ)| ≤ C·λ^{ΣL(gᵢ)}`, known by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthBound {
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub lambda: BigRational,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub constant: BigRational,
}

/// A group cochain with a pure evaluator.
#[derive(Clone)]
pub struct Cochain {
    name: String,
    arity: usize,
    normalized: bool,
    bound: Option<GrowthBound>,
    eval: Evaluator,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("normalized", &self.normalized)
            .finish_non_exhaustive()
    }
}

impl Cochain {
    /// `normalized` asserts that `φ` vanishes whenever an argument is `e`;
    /// see [`check_normalized`].
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        normalized: bool,
        eval: impl Fn(&[GroupElement]) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            name: name.into(),
            arity,
            normalized,
            bound: None,
            eval: Arc::new(eval),
        }
    }

    pub fn with_bound(mut self, bound: GrowthBound) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn zero(arity: usize) -> Self {
        Cochain::new("zero", arity, true, |_| Scalar::zero())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn declared_bound(&self) -> Option<&GrowthBound> {
        self.bound.as_ref()
    }

    pub fn evaluate(&self, args: &[GroupElement]) -> Result<Scalar> {
        if args.len() != self.arity {
            return Err(Error::DegreeMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        Ok((self.eval)(args))
    }

    /// Evaluation without the arity check; callers guarantee the length.
    pub(crate) fn eval_unchecked(&self, args: &[GroupElement]) -> Scalar {
        (self.eval)(args)
    }

    pub fn scaled(&self, s: Scalar) -> Cochain {
        let inner = self.clone();
        let bound = self.bound.as_ref().and_then(|b| {
            let m = s.abs();
            m.as_exact().map(|m| GrowthBound {
                lambda: b.lambda.clone(),
                constant: &b.constant * m,
            })
        });
        Cochain {
            name: format!("{s}*{}", self.name),
            arity: self.arity,
            normalized: self.normalized,
            bound,
            eval: Arc::new(move |a| &inner.eval_unchecked(a) * &s),
        }
    }

    pub fn plus(&self, other: &Cochain) -> Result<Cochain> {
        if self.arity != other.arity {
            return Err(Error::DegreeMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let bound = match (&self.bound, &other.bound) {
            (Some(x), Some(y)) => {
                let lambda = x.lambda.clone().max(y.lambda.clone());
                Some(GrowthBound {
                    lambda,
                    constant: &x.constant + &y.constant,
                })
            }
            _ => None,
        };
        Ok(Cochain {
            name: format!("({} + {})", self.name, other.name),
            arity: self.arity,
            normalized: self.normalized && other.normalized,
            bound,
            eval: Arc::new(move |g| &a.eval_unchecked(g) + &b.eval_unchecked(g)),
        })
    }

    /// Pointwise product.
    pub fn times(&self, other: &Cochain) -> Result<Cochain> {
        if self.arity != other.arity {
            return Err(Error::DegreeMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let bound = match (&self.bound, &other.bound) {
            (Some(x), Some(y)) => Some(GrowthBound {
                lambda: &x.lambda * &y.lambda,
                constant: &x.constant * &y.constant,
            }),
            _ => None,
        };
        Ok(Cochain {
            name: format!("({} * {})", self.name, other.name),
            arity: self.arity,
            normalized: self.normalized || other.normalized,
            bound,
            eval: Arc::new(move |g| &a.eval_unchecked(g) * &b.eval_unchecked(g)),
        })
    }
}

/// `(δφ)(g₁,…,g_{n+1}) = φ(g₂,…) + Σ_{i=1}^n (−1)^i φ(…, g_i g_{i+1}, …) + (−1)^{n+1} φ(g₁,…,gₙ)`.
pub fn bar_coboundary(group: &Group, phi: &Cochain) -> Cochain {
    let n = phi.arity;
    let (g, p) = (group.clone(), phi.clone());
    Cochain {
        name: format!("d({})", phi.name),
        arity: n + 1,
        normalized: phi.normalized,
        bound: None,
        eval: Arc::new(move |a: &[GroupElement]| {
            let mut total = p.eval_unchecked(&a[1..]);
            for i in 1..=n {
                let mut args = Vec::with_capacity(n);
                args.extend_from_slice(&a[..i - 1]);
                args.push(g.multiply(&a[i - 1], &a[i]));
                args.extend_from_slice(&a[i + 1..]);
                let v = p.eval_unchecked(&args);
                if i % 2 == 0 {
                    total += &v;
                } else {
                    total -= &v;
                }
            }
            let last = p.eval_unchecked(&a[..n]);
            if (n + 1).is_multiple_of(2) {
                total += &last;
            } else {
                total -= &last;
            }
            total
        }),
    }
}

/// First tuple in the radius-`R` scan with a unit argument and `φ ≠ 0`.
pub fn check_normalized(
    group: &Group,
    phi: &Cochain,
    radius: WordLength,
    cap: usize,
) -> Result<Option<Vec<GroupElement>>> {
    if phi.arity == 0 {
        return Ok(None);
    }
    // a unit argument does not change ΣL, so scan arity−1 tuples and insert e
    let e = group.identity();
    for (t, _) in group.tuples_within(phi.arity - 1, radius, cap)? {
        for pos in 0..phi.arity {
            let mut args = t.clone();
            args.insert(pos, e.clone());
            if !phi.eval_unchecked(&args).is_zero() {
                return Ok(Some(args));
            }
        }
    }
    Ok(None)
}

/// First tuple in the radius-`R` scan where `δφ ≠ 0`, with the value.
pub fn cocycle_defect(
    group: &Group,
    phi: &Cochain,
    radius: WordLength,
    cap: usize,
) -> Result<Option<(Vec<GroupElement>, Scalar)>> {
    let d = bar_coboundary(group, phi);
    for (t, _) in group.tuples_within(d.arity, radius, cap)? {
        let v = d.eval_unchecked(&t);
        if !v.is_zero() {
            return Ok(Some((t, v)));
        }
    }
    Ok(None)
}

/// Exponent sum of each generator.
fn abelianization(g: &GroupElement, rank: usize) -> Vec<i64> {
    match g {
        GroupElement::Vector(v) => v.clone(),
        GroupElement::Word(w) => {
            let mut out = vec![0i64; rank];
            for &l in w {
                out[l.unsigned_abs() as usize - 1] += l.signum() as i64;
            }
            out
        }
        GroupElement::Index(_) => vec![0; rank],
    }
}

fn default_area_pair() -> (usize, usize) {
    (0, 1)
}

/// Built-in cochain families; parameters are exact rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CochainSpec {
    Zero {
        arity: usize,
    },
    /// `φ(g) = Σ_k values[k]·(exponent sum of generator k)`; arity 1.
    Homomorphism {
        values: Vec<String>,
    },
    /// `Π L(gᵢ)^power`.
    LengthPower {
        arity: usize,
        power: u32,
    },
    /// `base^{ΣL(gᵢ)}` off degenerate tuples, `0` on them.
    Exponential {
        arity: usize,
        base: String,
    },
    /// `value` at one tuple, `0` elsewhere.
    Indicator {
        tuple: Vec<String>,
        #[serde(default = "one_string")]
        value: String,
    },
    /// `c(g, h) = g_i h_j − g_j h_i` on `ℤ^k`.
    Area {
        #[serde(default = "default_area_pair")]
        pair: (usize, usize),
    },
    /// Finitely supported: `[[tuple…], value]` entries.
    Table {
        arity: usize,
        entries: Vec<(Vec<String>, String)>,
    },
    Sum {
        terms: Vec<CochainSpec>,
    },
    Product {
        factors: Vec<CochainSpec>,
    },
    Scale {
        factor: String,
        inner: Box<CochainSpec>,
    },
    Coboundary {
        inner: Box<CochainSpec>,
    },
}

/// `max_L L^p / 2^L`; the ratio decreases once `L > p / ln 2`.
fn length_power_constant(p: u32) -> BigRational {
    (0..=2 * p as u64 + 2)
        .map(|l| {
            BigRational::new(
                num_traits::pow(num_bigint::BigInt::from(l), p as usize),
                num_traits::pow(num_bigint::BigInt::from(2), l as usize),
            )
        })
        .max()
        .expect("nonempty range")
}

fn one_string() -> String {
    "1".into()
}

impl CochainSpec {
    pub fn build(&self, group: &Group) -> Result<Cochain> {
        let scalar = |s: &str| s.parse::<Scalar>();
        let elements = |ws: &[String]| {
            ws.iter()
                .map(|w| group.parse_element(w))
                .collect::<Result<Vec<_>>>()
        };
        Ok(match self {
            CochainSpec::Zero { arity } => Cochain::zero(*arity),
            CochainSpec::Homomorphism { values } => {
                let rank = match (group.kind(), group.rank()) {
                    (GroupKind::FiniteTable, _) | (_, None) => {
                        return Err(Error::Unsupported(
                            "a nonzero homomorphism to ℂ on a finite group".into(),
                        ))
                    }
                    (_, Some(r)) => r,
                };
                if values.len() != rank {
                    return Err(Error::InvalidParameter(format!(
                        "homomorphism needs {rank} generator values, got {}",
                        values.len()
                    )));
                }
                let vals: Vec<Scalar> = values.iter().map(|v| scalar(v)).collect::<Result<_>>()?;
                let name = format!("hom[{}]", values.join(","));
                Cochain::new(name, 1, true, move |a| {
                    abelianization(&a[0], rank)
                        .iter()
                        .zip(&vals)
                        .fold(Scalar::zero(), |acc, (k, v)| {
                            &acc + &(v * &Scalar::from_int(*k))
                        })
                })
            }
            CochainSpec::LengthPower { arity, power } => {
                let (g, p) = (group.clone(), *power);
                Cochain::new(format!("L^{p}"), *arity, p > 0, move |a| {
                    a.iter().fold(Scalar::one(), |acc, x| {
                        &acc * &Scalar::from_int(g.word_length(x).pow(p) as i64)
                    })
                })
                .with_bound(GrowthBound {
                    lambda: BigRational::from_integer(2.into()),
                    constant: num_traits::pow(length_power_constant(p), *arity),
                })
            }
            CochainSpec::Exponential { arity, base } => {
                let b = parse_rational(base)?;
                if b < BigRational::from_integer(1.into()) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential base {b} must be ≥ 1"
                    )));
                }
                let g = group.clone();
                let bb = b.clone();
                Cochain::new(format!("{b}^L"), *arity, true, move |a| {
                    if a.iter().any(|x| g.is_identity(x)) {
                        Scalar::zero()
                    } else {
                        Scalar::real(num_traits::pow(bb.clone(), g.total_length(a) as usize))
                    }
                })
                .with_bound(GrowthBound {
                    lambda: b,
                    constant: BigRational::from_integer(1.into()),
                })
            }
            CochainSpec::Indicator { tuple, value } => {
                let at = elements(tuple)?;
                let v = scalar(value)?;
                let normalized = !at.iter().any(|x| group.is_identity(x)) || v.is_zero();
                Cochain::new(
                    format!("1[{}]", tuple.join(",")),
                    at.len(),
                    normalized,
                    move |a| {
                        if a == at.as_slice() {
                            v.clone()
                        } else {
                            Scalar::zero()
                        }
                    },
                )
            }
            CochainSpec::Area { pair: (i, j) } => {
                let rank = match (group.kind(), group.rank()) {
                    (GroupKind::FreeAbelian, Some(r)) if r >= 2 && i != j && *i < r && *j < r => r,
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "area cocycle ({i},{j}) needs a free abelian group of rank > max(i, j)"
                        )))
                    }
                };
                let (i, j) = (*i, *j);
                Cochain::new(format!("area({i},{j})"), 2, true, move |a| {
                    let (g, h) = (abelianization(&a[0], rank), abelianization(&a[1], rank));
                    Scalar::from_int(g[i] * h[j] - g[j] * h[i])
                })
                // |g_i h_j − g_j h_i| ≤ L(g)L(h) ≤ 2^{L(g)} 2^{L(h)}
                .with_bound(GrowthBound {
                    lambda: BigRational::from_integer(2.into()),
                    constant: BigRational::from_integer(1.into()),
                })
            }
            CochainSpec::Table { arity, entries } => {
                let mut table = std::collections::BTreeMap::new();
                for (t, v) in entries {
                    let at = elements(t)?;
                    if at.len() != *arity {
                        return Err(Error::DegreeMismatch {
                            expected: *arity,
                            found: at.len(),
                        });
                    }
                    table.insert(at, scalar(v)?);
                }
                let normalized = table
                    .iter()
                    .all(|(t, v)| v.is_zero() || !t.iter().any(|x| group.is_identity(x)));
                Cochain::new("table", *arity, normalized, move |a| {
                    table.get(a).cloned().unwrap_or_default()
                })
            }
            CochainSpec::Sum { terms } => {
                let mut it = terms.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidParameter("empty sum".into()))?
                    .build(group)?;
                it.try_fold(first, |acc, t| acc.plus(&t.build(group)?))?
            }
            CochainSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidParameter("empty product".into()))?
                    .build(group)?;
                it.try_fold(first, |acc, t| acc.times(&t.build(group)?))?
            }
            CochainSpec::Scale { factor, inner } => inner.build(group)?.scaled(scalar(factor)?),
            CochainSpec::Coboundary { inner } => bar_coboundary(group, &inner.build(group)?),
        })
    }
}
