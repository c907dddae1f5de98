//! Fitted growth constants `C_λ(R) = max_{ΣL ≤ R} |φ|·λ^{−ΣL}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::Cochain;
use crate::error::{Error, Result};
use crate::groups::{Group, WordLength};
use crate::scalar::{rational_pow, Magnitude};

#[derive(Clone, Debug)]
pub struct GrowthOptions {
    pub lambdas: Vec<BigRational>,
    pub radii: Vec<WordLength>,
    pub cap: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        GrowthOptions {
            lambdas: vec![q(2, 1), q(3, 2), q(5, 4), q(9, 8)],
            radii: vec![4, 6, 8, 10],
            cap: crate::groups::DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum GrowthClass {
    /// `C_λ(R)` stable across the two largest radii for every grid `λ`.
    SubexponentialConsistent,
    /// Diverging up to `lower`, stable from `upper` on.
    ExponentialOnly {
        #[serde(serialize_with = "crate::scalar::serialize_rational")]
        lower: BigRational,
        #[serde(serialize_with = "crate::scalar::serialize_rational")]
        upper: BigRational,
    },
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub lambda: BigRational,
    #[serde(rename = "R")]
    pub radius: WordLength,
    pub constant: Magnitude,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub cochain: String,
    pub arity: usize,
    pub rows: Vec<GrowthRow>,
    /// `M_ℓ = max_{ΣL = ℓ} |φ|` for `ℓ = 0 … max R`.
    pub sphere_maxima: Vec<Magnitude>,
    pub classification: GrowthClass,
    /// Smallest `d ≤ 6` with `max |φ|/max(1,ΣL)^d` stable, when one exists.
    pub polynomial_degree: Option<u32>,
    /// `(M_{R₂}/M_{R₁})^{1/(R₂−R₁)}` over the two largest radii.
    pub base_estimate: Option<Magnitude>,
}

impl GrowthReport {
    pub fn constant(&self, lambda: &BigRational, radius: WordLength) -> Option<&Magnitude> {
        self.rows
            .iter()
            .find(|r| &r.lambda == lambda && r.radius == radius)
            .map(|r| &r.constant)
    }

    /// `lambda,R,C` rows with exact values (enclosures as `[lo,hi]`).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,R,C\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.lambda, r.radius, r.constant));
        }
        s
    }
}

/// Sphere maxima of `|φ|` up to `radius`.
fn sphere_maxima(
    group: &Group,
    phi: &Cochain,
    radius: WordLength,
    cap: usize,
) -> Result<Vec<Magnitude>> {
    let tuples = group.tuples_within(phi.arity(), radius, cap)?;
    let len = radius as usize + 1;
    let maxima = tuples
        .par_iter()
        .fold(
            || vec![Magnitude::zero(); len],
            |mut acc, (t, l)| {
                let v = phi.eval_unchecked(t).abs();
                acc[*l as usize] = acc[*l as usize].max(&v);
                acc
            },
        )
        .reduce(
            || vec![Magnitude::zero(); len],
            |a, b| a.iter().zip(&b).map(|(x, y)| x.max(y)).collect(),
        );
    Ok(maxima)
}

fn running_max(
    maxima: &[Magnitude],
    weight: impl Fn(usize) -> BigRational,
    radius: WordLength,
) -> Magnitude {
    maxima[..=radius as usize]
        .iter()
        .enumerate()
        .fold(Magnitude::zero(), |acc, (l, m)| {
            acc.max(&m.scale(&weight(l)))
        })
}

fn stable(a: &Magnitude, b: &Magnitude) -> bool {
    a == b || a.certain_le(b) == Some(true)
}

/// `C_λ(R)` for a single pair.
pub fn fitted_constant(
    group: &Group,
    phi: &Cochain,
    lambda: &BigRational,
    radius: WordLength,
    cap: usize,
) -> Result<Magnitude> {
    if lambda <= &BigRational::zero() {
        return Err(Error::InvalidParameter(format!(
            "λ = {lambda} must be positive"
        )));
    }
    let m = sphere_maxima(group, phi, radius, cap)?;
    Ok(running_max(
        &m,
        |l| rational_pow(lambda, -(l as i64)),
        radius,
    ))
}

/// Fits `C_λ(R)` on the grid and classifies the growth.
pub fn growth_fit(group: &Group, phi: &Cochain, opts: &GrowthOptions) -> Result<GrowthReport> {
    if opts.lambdas.is_empty() || opts.radii.is_empty() {
        return Err(Error::InvalidParameter(
            "λ grid and radius list must be nonempty".into(),
        ));
    }
    if let Some(l) = opts.lambdas.iter().find(|l| **l <= BigRational::one()) {
        return Err(Error::InvalidParameter(format!("grid λ = {l} must be > 1")));
    }
    let mut radii = opts.radii.clone();
    radii.sort_unstable();
    radii.dedup();
    let r_max = *radii.last().expect("nonempty");
    let maxima = sphere_maxima(group, phi, r_max, opts.cap)?;

    let mut rows = Vec::new();
    let mut stable_at: Vec<(BigRational, bool)> = Vec::new();
    for lambda in &opts.lambdas {
        let mut last: Option<Magnitude> = None;
        let mut prev: Option<Magnitude> = None;
        for &r in &radii {
            let c = running_max(&maxima, |l| rational_pow(lambda, -(l as i64)), r);
            prev = last.replace(c.clone());
            rows.push(GrowthRow {
                lambda: lambda.clone(),
                radius: r,
                constant: c,
            });
        }
        let ok = match (&prev, &last) {
            (Some(p), Some(l)) => stable(l, p),
            _ => false,
        };
        stable_at.push((lambda.clone(), ok));
    }

    let classification = if stable_at.iter().all(|(_, ok)| *ok) && radii.len() >= 2 {
        GrowthClass::SubexponentialConsistent
    } else {
        let diverging = stable_at.iter().filter(|(_, ok)| !ok).map(|(l, _)| l).max();
        let above = stable_at
            .iter()
            .filter(|(l, ok)| *ok && Some(l) > diverging)
            .map(|(l, _)| l)
            .min();
        match (diverging, above) {
            (Some(lo), Some(hi)) if radii.len() >= 2 => GrowthClass::ExponentialOnly {
                lower: lo.clone(),
                upper: hi.clone(),
            },
            _ => GrowthClass::Inconclusive,
        }
    };

    // a bounded window cannot tell 3^ℓ from ℓ^5, so only fit when no λ diverges
    let polynomial_degree =
        if radii.len() >= 2 && classification == GrowthClass::SubexponentialConsistent {
            let (r1, r2) = (radii[radii.len() - 2], r_max);
            (0..=6u32).find(|&d| {
                let w = |l: usize| {
                    BigRational::new(
                        BigInt::one(),
                        num_traits::pow(BigInt::from(l.max(1)), d as usize),
                    )
                };
                stable(&running_max(&maxima, w, r2), &running_max(&maxima, w, r1))
            })
        } else {
            None
        };

    let base_estimate = if radii.len() >= 2 {
        let (r1, r2) = (radii[radii.len() - 2], r_max);
        let (m1, m2) = (&maxima[r1 as usize], &maxima[r2 as usize]);
        match (m1.as_exact(), m2.as_exact()) {
            (Some(a), Some(b)) if !a.is_zero() => Some(Magnitude::root(&(b / a), (r2 - r1) as u32)),
            _ => None,
        }
    } else {
        None
    };

    Ok(GrowthReport {
        cochain: phi.name().to_string(),
        arity: phi.arity(),
        rows,
        sphere_maxima: maxima,
        classification,
        polynomial_degree,
        base_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::CochainSpec;
    use crate::groups::{GroupElement, DEFAULT_CAP};
    use crate::scalar::Scalar;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn opts(lambdas: &[BigRational]) -> GrowthOptions {
        GrowthOptions {
            lambdas: lambdas.to_vec(),
            ..Default::default()
        }
    }

    #[test]
    fn homomorphism_on_z() {
        let z = Group::free_abelian(1).unwrap();
        let phi = CochainSpec::Homomorphism {
            values: vec!["1".into()],
        }
        .build(&z)
        .unwrap();
        let rep = growth_fit(&z, &phi, &GrowthOptions::default()).unwrap();
        for r in [4, 6, 8, 10] {
            // oracle: max_{|k| ≤ R} |k|·2^{−|k|}
            let oracle = (0..=r as i64)
                .map(|k| q(k, 1) * rational_pow(&q(2, 1), -k))
                .max()
                .unwrap();
            assert_eq!(rep.constant(&q(2, 1), r), Some(&Magnitude::exact(oracle)));
            assert_eq!(rep.constant(&q(2, 1), r), Some(&Magnitude::exact(q(1, 2))));
        }
        assert_eq!(rep.classification, GrowthClass::SubexponentialConsistent);
        assert_eq!(rep.polynomial_degree, Some(1));
    }

    #[test]
    fn zero_cochain() {
        let z = Group::free_abelian(1).unwrap();
        let rep = growth_fit(
            &z,
            &crate::analysis::Cochain::zero(1),
            &GrowthOptions::default(),
        )
        .unwrap();
        assert!(rep.rows.iter().all(|r| r.constant.is_zero()));
        assert_eq!(rep.polynomial_degree, Some(0));
    }

    #[test]
    fn three_to_the_length() {
        let z = Group::free_abelian(1).unwrap();
        let phi = CochainSpec::Exponential {
            arity: 1,
            base: "3".into(),
        }
        .build(&z)
        .unwrap();
        let rep = growth_fit(&z, &phi, &opts(&[q(2, 1), q(4, 1)])).unwrap();
        for r in [4, 6, 8, 10] {
            assert_eq!(
                rep.constant(&q(2, 1), r),
                Some(&Magnitude::exact(rational_pow(&q(3, 2), r as i64)))
            );
            assert_eq!(rep.constant(&q(4, 1), r), Some(&Magnitude::exact(q(3, 4))));
        }
        assert_eq!(
            rep.classification,
            GrowthClass::ExponentialOnly {
                lower: q(2, 1),
                upper: q(4, 1)
            }
        );
        assert_eq!(rep.base_estimate, Some(Magnitude::from_int(3)));
        assert_eq!(rep.polynomial_degree, None);
        // the default grid never stabilizes
        let rep = growth_fit(&z, &phi, &GrowthOptions::default()).unwrap();
        assert_eq!(rep.classification, GrowthClass::Inconclusive);
    }

    #[test]
    fn monotone_in_radius_and_lambda() {
        let f2 = Group::free(2).unwrap();
        let phi = CochainSpec::LengthPower { arity: 1, power: 2 }
            .build(&f2)
            .unwrap();
        let grid = [q(9, 8), q(5, 4), q(3, 2), q(2, 1)];
        let rep = growth_fit(
            &f2,
            &phi,
            &GrowthOptions {
                lambdas: grid.to_vec(),
                radii: vec![2, 4, 6],
                cap: DEFAULT_CAP,
            },
        )
        .unwrap();
        for w in grid.windows(2) {
            for r in [2, 4, 6] {
                assert!(
                    rep.constant(&w[1], r)
                        .unwrap()
                        .certain_le(rep.constant(&w[0], r).unwrap())
                        == Some(true)
                );
            }
        }
        for l in &grid {
            assert!(
                rep.constant(l, 2)
                    .unwrap()
                    .certain_le(rep.constant(l, 6).unwrap())
                    == Some(true)
            );
        }
        // ℓ²·(9/8)^{−ℓ} peaks past radius 6
        assert_eq!(rep.polynomial_degree, None);
        let rep = growth_fit(&f2, &phi, &opts(&[q(2, 1)])).unwrap();
        assert_eq!(rep.polynomial_degree, Some(2));
    }

    #[test]
    fn csv_shape() {
        let z = Group::free_abelian(1).unwrap();
        let phi = crate::analysis::Cochain::new("t", 1, false, |a| match &a[0] {
            GroupElement::Vector(v) => Scalar::from_int(v[0]),
            _ => unreachable!(),
        });
        let rep = growth_fit(&z, &phi, &opts(&[q(2, 1)])).unwrap();
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("lambda,R,C\n2,4,1/2\n"));
    }
}
