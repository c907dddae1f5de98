//! Cyclic cocycles `τ_c` built from group cochains, their pairing with
//! chains, and exact certificates for the bound
//! `|τ_c(x)| ≤ C·D_{N,m,n}·η_{N,m}(x)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Chain, Tuple};
use crate::analysis::{eta_seminorm, fitted_constant, Cochain, EtaParams};
use crate::complexes::{hochschild_b, homogeneous_part, rotated, Convention};
use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement, WordLength};
use crate::scalar::{factorial, Magnitude, Scalar};

type Evaluator = Arc<dyn Fn(&[GroupElement]) -> Scalar + Send + Sync>;

/// What is known about `τ_c ∘ τ = ±τ_c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Cyclicity {
    Unverified,
    VerifiedOnSamples {
        samples: usize,
        convention: Convention,
    },
    Symmetrized {
        convention: Convention,
    },
}

/// How the group cochain under `τ_c` was obtained from the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Raw,
    /// Replaced by the alternation of its homogeneous form.
    Alternated,
}

/// `τ_c(g₀,…,gₙ) = c(g₁,…,gₙ)` on tuples with `g₀⋯gₙ = e`, zero elsewhere,
/// possibly followed by cyclic averaging.
#[derive(Clone)]
pub struct CyclicCocycle {
    name: String,
    base: Cochain,
    construction: Construction,
    cyclicity: Cyclicity,
    eval: Evaluator,
}

impl fmt::Debug for CyclicCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclicCocycle")
            .field("name", &self.name)
            .field("arity", &self.arity())
            .field("construction", &self.construction)
            .field("cyclicity", &self.cyclicity)
            .finish_non_exhaustive()
    }
}

impl CyclicCocycle {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Chain degree `n`; `τ_c` takes `n+1` arguments.
    pub fn arity(&self) -> usize {
        self.base.arity()
    }

    /// The normalized group cochain actually extended.
    pub fn base(&self) -> &Cochain {
        &self.base
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn cyclicity(&self) -> &Cyclicity {
        &self.cyclicity
    }

    pub fn evaluate(&self, t: &[GroupElement]) -> Result<Scalar> {
        if t.len() != self.arity() + 1 {
            return Err(Error::DegreeMismatch {
                expected: self.arity(),
                found: t.len().saturating_sub(1),
            });
        }
        Ok((self.eval)(t))
    }
}

/// The raw extension of a normalized cochain.
pub fn extend_to_cyclic(group: &Group, c: &Cochain) -> Result<CyclicCocycle> {
    if !c.is_normalized() {
        return Err(Error::NotNormalized(c.name().to_string()));
    }
    Ok(extension(group, c.clone(), Construction::Raw))
}

/// Like [`extend_to_cyclic`], but a non-normalized `c` is first replaced by
/// [`alternate`], which is normalized and cohomologous for cocycles.
pub fn extend_to_cyclic_normalizing(group: &Group, c: &Cochain) -> CyclicCocycle {
    if c.is_normalized() {
        extension(group, c.clone(), Construction::Raw)
    } else {
        extension(group, alternate(group, c), Construction::Alternated)
    }
}

fn extension(group: &Group, base: Cochain, construction: Construction) -> CyclicCocycle {
    let g = group.clone();
    let c = base.clone();
    CyclicCocycle {
        name: format!("tau({})", base.name()),
        base,
        construction,
        cyclicity: Cyclicity::Unverified,
        eval: Arc::new(move |t: &[GroupElement]| {
            if g.is_identity(&g.product(t)) {
                c.eval_unchecked(&t[1..])
            } else {
                Scalar::zero()
            }
        }),
    }
}

/// All permutations of `0..k` with their signs.
fn signed_permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = vec![(Vec::new(), true)];
    for next in 0..k {
        let mut grown = Vec::with_capacity(out.len() * (next + 1));
        for (p, even) in &out {
            // inserting at position i moves `next` past next−i entries
            for i in 0..=next {
                let mut q = p.clone();
                q.insert(i, next);
                grown.push((q, *even == ((next - i) % 2 == 0)));
            }
        }
        out = grown;
    }
    out
}

/// Antisymmetrization of the homogeneous form
/// `ĉ(h₀,…,hₙ) = c(h₀⁻¹h₁,…,hₙ₋₁⁻¹hₙ)` over all orderings of the points,
/// read back at `(e, g₁, g₁g₂, …)`. The result is normalized, commutes with
/// the coboundary, and its raw extension is cyclic with sign `(−1)ⁿ`.
pub fn alternate(group: &Group, c: &Cochain) -> Cochain {
    let n = c.arity();
    let perms = signed_permutations(n + 1);
    let scale = Scalar::real(BigRational::new(BigInt::from(1), factorial(n as u64 + 1)));
    let (g, base) = (group.clone(), c.clone());
    let name = format!("alt({})", c.name());
    Cochain::new(name, n, true, move |args: &[GroupElement]| {
        let mut points = Vec::with_capacity(n + 1);
        points.push(g.identity());
        for a in args {
            let next = g.multiply(points.last().expect("nonempty"), a);
            points.push(next);
        }
        let mut total = Scalar::zero();
        let mut inhom = Vec::with_capacity(n);
        for (p, even) in &perms {
            inhom.clear();
            for w in p.windows(2) {
                inhom.push(g.multiply(&g.inverse(&points[w[0]]), &points[w[1]]));
            }
            let v = base.eval_unchecked(&inhom);
            if *even {
                total += &v;
            } else {
                total -= &v;
            }
        }
        &total * &scale
    })
}

/// `r^k(t)` for `r(a₀,…,aₙ) = (aₙ,a₀,…,aₙ₋₁)`.
fn rotate_right(t: &[GroupElement], k: usize) -> Tuple {
    let len = t.len();
    rotated(t, (len - k % len) % len)
}

/// `(1/(n+1))·Σ_k s^k·τ_c(r^k t)` with `s` the convention's cyclic sign.
/// A projection whenever `s^{n+1} = 1`, which always holds under
/// [`Convention::Standard`].
pub fn cyclic_symmetrize(tc: &CyclicCocycle, convention: Convention) -> CyclicCocycle {
    let n = tc.arity();
    let s = Scalar::from_int(convention.tau_sign(n));
    let inv = Scalar::real(BigRational::new(1.into(), BigInt::from(n + 1)));
    let inner = tc.eval.clone();
    CyclicCocycle {
        name: format!("sym({})", tc.name),
        base: tc.base.clone(),
        construction: tc.construction,
        cyclicity: Cyclicity::Symmetrized { convention },
        eval: Arc::new(move |t: &[GroupElement]| {
            let mut total = Scalar::zero();
            let mut sk = Scalar::one();
            for k in 0..=n {
                total += &(&sk * &inner(&rotate_right(t, k)));
                sk = &sk * &s;
            }
            &total * &inv
        }),
    }
}

/// First sample `t` with `τ_c(r t) ≠ s·τ_c(t)`.
pub fn cyclicity_witness(
    tc: &CyclicCocycle,
    tuples: &[Tuple],
    convention: Convention,
) -> Result<Option<Tuple>> {
    let n = tc.arity();
    let s = Scalar::from_int(convention.tau_sign(n));
    for t in tuples {
        if tc.evaluate(&rotate_right(t, 1))? != &s * &tc.evaluate(t)? {
            return Ok(Some(t.clone()));
        }
    }
    Ok(None)
}

/// Marks `tc` as verified if no sample witnesses a failure.
pub fn verify_cyclicity(
    tc: &CyclicCocycle,
    tuples: &[Tuple],
    convention: Convention,
) -> Result<std::result::Result<CyclicCocycle, Tuple>> {
    Ok(match cyclicity_witness(tc, tuples, convention)? {
        Some(t) => Err(t),
        None => {
            let mut out = tc.clone();
            out.cyclicity = Cyclicity::VerifiedOnSamples {
                samples: tuples.len(),
                convention,
            };
            Ok(out)
        }
    })
}

/// Every `(g₀,…,gₙ)` with `g₀⋯gₙ = e` and `ΣL(g₁,…,gₙ) ≤ radius`.
pub fn homogeneous_tuples(
    group: &Group,
    n: usize,
    radius: WordLength,
    cap: usize,
) -> Result<Vec<Tuple>> {
    Ok(group
        .tuples_within(n, radius, cap)?
        .into_iter()
        .map(|(tail, _)| {
            let mut t = Vec::with_capacity(n + 1);
            t.push(group.inverse(&group.product(&tail)));
            t.extend(tail);
            t
        })
        .collect())
}

/// A cyclic cocycle for `c`, checked on the homogeneous tuples of the given
/// radius. The raw extension is kept when it passes; otherwise `c` is
/// replaced by its alternation, and averaging is the last resort.
pub fn cyclic_cocycle_for(
    group: &Group,
    c: &Cochain,
    convention: Convention,
    radius: WordLength,
    cap: usize,
) -> Result<CyclicCocycle> {
    let samples = homogeneous_tuples(group, c.arity(), radius, cap)?;
    if c.is_normalized() {
        if let Ok(tc) = verify_cyclicity(
            &extension(group, c.clone(), Construction::Raw),
            &samples,
            convention,
        )? {
            return Ok(tc);
        }
    }
    let alt = extension(group, alternate(group, c), Construction::Alternated);
    Ok(match verify_cyclicity(&alt, &samples, convention)? {
        Ok(tc) => tc,
        Err(_) => cyclic_symmetrize(&alt, convention),
    })
}

/// `Σ γ_i·τ_c(tᵢ)`.
pub fn pair(tc: &CyclicCocycle, x: &Chain) -> Result<Scalar> {
    if x.degree() != tc.arity() {
        return Err(Error::DegreeMismatch {
            expected: tc.arity(),
            found: x.degree(),
        });
    }
    Ok(x.terms()
        .fold(Scalar::zero(), |acc, (t, c)| acc + &(c * &(tc.eval)(t))))
}

#[derive(Clone, Debug, Serialize)]
pub struct FactoringReport {
    pub full: Scalar,
    pub homogeneous: Scalar,
    pub equal: bool,
}

/// Compares `pair(τ_c, x)` with the pairing against the `⟨e⟩` summand.
pub fn homogeneous_factoring_check(
    group: &Group,
    tc: &CyclicCocycle,
    x: &Chain,
) -> Result<FactoringReport> {
    let full = pair(tc, x)?;
    let homogeneous = pair(tc, &homogeneous_part(group, x))?;
    Ok(FactoringReport {
        equal: full == homogeneous,
        full,
        homogeneous,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationReport {
    pub cocycle: String,
    pub samples: usize,
    /// Indices of samples `y` with `pair(τ_c, b y) ≠ 0` and those values.
    pub defects: Vec<(usize, Scalar)>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.defects.is_empty()
    }
}

/// `pair(τ_c, b y)` for each sample of degree `n+1`.
pub fn b_annihilation_check(
    group: &Group,
    tc: &CyclicCocycle,
    ys: &[Chain],
) -> Result<AnnihilationReport> {
    let values = ys
        .par_iter()
        .map(|y| {
            if y.degree() != tc.arity() + 1 {
                return Err(Error::DegreeMismatch {
                    expected: tc.arity() + 1,
                    found: y.degree(),
                });
            }
            pair(tc, &hochschild_b(group, y)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnihilationReport {
        cocycle: tc.name.clone(),
        samples: ys.len(),
        defects: values
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .collect(),
    })
}

/// Where the growth constant `C` comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum ConstantSource {
    /// Exact max of `|c|·λ^{−ΣL}` over the covering ball.
    Fitted { cover_radius: WordLength },
    /// Known by construction and not smaller than the fitted value.
    Declared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCertificate {
    pub chain: String,
    pub cochain: String,
    pub params: EtaParams,
    pub degree: usize,
    pub left: Magnitude,
    pub constant: Magnitude,
    pub constant_source: ConstantSource,
    #[serde(rename = "D", serialize_with = "crate::scalar::serialize_rational")]
    pub d: BigRational,
    pub eta: Magnitude,
    pub right: Magnitude,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundConstant {
    Fit {
        cover_radius: WordLength,
    },
    /// Use the cochain's declared bound; requires its `λ` to equal the
    /// parameters' `λ`. Checked against the fit at `cover_radius`.
    Declared {
        cover_radius: WordLength,
    },
}

/// Certificate for `|τ_c(x)| ≤ C·D_{N,m,n}·η_{N,m}(x)` with `τ_c` the raw
/// extension of `c`.
pub fn verify_pairing_bound(
    group: &Group,
    c: &Cochain,
    x: &Chain,
    chain_id: &str,
    params: &EtaParams,
    constant: &BoundConstant,
    cap: usize,
) -> Result<BoundCertificate> {
    let tc = extend_to_cyclic(group, c)?;
    let n = x.degree();
    if c.arity() != n {
        return Err(Error::DegreeMismatch {
            expected: c.arity(),
            found: n,
        });
    }
    let cover_radius = match constant {
        BoundConstant::Fit { cover_radius } | BoundConstant::Declared { cover_radius } => {
            *cover_radius
        }
    };
    let needed = x.max_total_length(group);
    if cover_radius < needed {
        return Err(Error::CoverRadiusTooSmall {
            cover: cover_radius,
            needed,
        });
    }
    let fitted = fitted_constant(group, c, params.lambda(), cover_radius, cap)?;
    let (constant, constant_source) = match constant {
        BoundConstant::Fit { cover_radius } => (
            fitted,
            ConstantSource::Fitted {
                cover_radius: *cover_radius,
            },
        ),
        BoundConstant::Declared { .. } => {
            let b = c.declared_bound().ok_or_else(|| {
                Error::InvalidParameter(format!("cochain `{}` declares no bound", c.name()))
            })?;
            if &b.lambda != params.lambda() {
                return Err(Error::InvalidParameter(format!(
                    "declared bound is for λ = {}, parameters use λ = {}",
                    b.lambda,
                    params.lambda()
                )));
            }
            let declared = Magnitude::exact(b.constant.clone());
            if fitted.certain_le(&declared) != Some(true) {
                return Err(Error::InvalidParameter(format!(
                    "declared constant {declared} is below the fitted value {fitted}"
                )));
            }
            (declared, ConstantSource::Declared)
        }
    };
    let left = pair(&tc, x)?.abs();
    let d = params.d_constant(n);
    let eta = eta_seminorm(group, x, params);
    let right = constant.mul(&eta).scale(&d);
    let verdict = match left.certain_le(&right) {
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
        None => Verdict::Undecided,
    };
    Ok(BoundCertificate {
        chain: chain_id.to_string(),
        cochain: c.name().to_string(),
        params: params.clone(),
        degree: n,
        left,
        constant,
        constant_source,
        d,
        eta,
        right,
        verdict,
    })
}
