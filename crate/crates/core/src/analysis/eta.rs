//! The seminorms `η_{N,m}` on `Ω*(ℓ¹_λ(π))`, evaluated on finitely
//! supported chains as weighted ℓ¹ sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::Chain;
use crate::complexes::{connes_b, hochschild_b, Convention};
use crate::error::{Error, Result};
use crate::groups::Group;
use crate::scalar::{factorial, Magnitude};

/// Parameters `N ≥ 1`, `m ≥ 0` and the weight base `λ ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaParams {
    n: BigRational,
    m: u32,
    lambda: BigRational,
}

impl EtaParams {
    pub fn new(n: BigRational, m: u32, lambda: BigRational) -> Result<Self> {
        if n < BigRational::one() {
            return Err(Error::InvalidParameter(format!("N = {n} must be ≥ 1")));
        }
        if lambda < BigRational::one() {
            return Err(Error::InvalidParameter(format!("λ = {lambda} must be ≥ 1")));
        }
        Ok(EtaParams { n, m, lambda })
    }

    pub fn n(&self) -> &BigRational {
        &self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn with_m(&self, m: u32) -> Self {
        EtaParams { m, ..self.clone() }
    }

    /// `c(2k) = c(2k+1) = k`.
    pub fn c(degree: usize) -> u64 {
        degree as u64 / 2
    }

    /// `(2+2c)^m / (c!·N^c)` with `c = c(degree)`.
    pub fn weight(&self, degree: usize) -> BigRational {
        let c = Self::c(degree);
        let num = num_traits::pow(BigInt::from(2 + 2 * c), self.m as usize);
        let den =
            BigRational::from_integer(factorial(c)) * num_traits::pow(self.n.clone(), c as usize);
        BigRational::from_integer(num) / den
    }

    /// `D_{N,m,n} = c!·(2+2c)^{−m}·N^c`, the reciprocal weight.
    pub fn d_constant(&self, degree: usize) -> BigRational {
        self.weight(degree).recip()
    }
}

#[derive(Serialize)]
struct EtaParamsRepr {
    #[serde(rename = "N")]
    n: String,
    m: u32,
    lambda: String,
}

impl Serialize for EtaParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EtaParamsRepr {
            n: self.n.to_string(),
            m: self.m,
            lambda: self.lambda.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EtaParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(rename = "N")]
            n: String,
            m: u32,
            lambda: String,
        }
        let raw = Raw::deserialize(d)?;
        let parse = |s: &str| crate::scalar::parse_rational(s).map_err(serde::de::Error::custom);
        EtaParams::new(parse(&raw.n)?, raw.m, parse(&raw.lambda)?).map_err(serde::de::Error::custom)
    }
}

/// `η_{N,m}(x) = weight(n)·Σ|γ_i|·λ^{ΣL(g_{ji})}`.
pub fn eta_seminorm(group: &Group, x: &Chain, params: &EtaParams) -> Magnitude {
    let sum = x.terms().fold(Magnitude::zero(), |acc, (t, c)| {
        acc.add(&c.abs().scale(&crate::algebra::weight_power(
            &params.lambda,
            group.total_length(t),
        )))
    });
    sum.scale(&params.weight(x.degree()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundedOp {
    #[serde(rename = "b")]
    Hochschild,
    #[serde(rename = "B")]
    Connes,
}

impl BoundedOp {
    /// Target `m′` for source `m`.
    pub fn m_schedule(self, m: u32) -> u32 {
        match self {
            BoundedOp::Hochschild => m,
            BoundedOp::Connes => m + 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessReport {
    pub op: BoundedOp,
    pub params: EtaParams,
    pub m_target: u32,
    pub degree: usize,
    pub samples: usize,
    /// `max η_{N,m′}(op x) / η_{N,m}(x)` over the samples.
    pub max_ratio: Option<Magnitude>,
    pub finite: bool,
}

/// Empirical operator constant of `b` or `B` for `η_{N,m} → η_{N,m′}`.
pub fn boundedness_check(
    group: &Group,
    op: BoundedOp,
    params: &EtaParams,
    samples: &[Chain],
    convention: Convention,
) -> Result<BoundednessReport> {
    let degree = samples.first().map_or(0, Chain::degree);
    let target = params.with_m(op.m_schedule(params.m));
    let mut max_ratio: Option<Magnitude> = None;
    for x in samples {
        if x.degree() != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: x.degree(),
            });
        }
        if x.is_zero() {
            return Err(Error::InvalidParameter(
                "boundedness samples must be nonzero".into(),
            ));
        }
        let y = match op {
            BoundedOp::Hochschild => hochschild_b(group, x)?,
            BoundedOp::Connes => connes_b(group, x, convention),
        };
        let ratio = eta_seminorm(group, &y, &target)
            .div(&eta_seminorm(group, x, params))
            .ok_or_else(|| {
                Error::InvalidParameter("seminorm of a nonzero chain vanished".into())
            })?;
        max_ratio = Some(match max_ratio {
            None => ratio,
            Some(r) => r.max(&ratio),
        });
    }
    Ok(BoundednessReport {
        op,
        params: params.clone(),
        m_target: target.m,
        degree,
        samples: samples.len(),
        finite: max_ratio.is_some(),
        max_ratio,
    })
}
