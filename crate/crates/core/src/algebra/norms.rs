//! Weighted ℓ¹ norms, the reduced C*-norm and the unconditional seminorm `‖|f|‖_r`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use nalgebra::{Complex, DMatrix};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{weight_power, AlgebraElement};
use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement, GroupKind};
use crate::scalar::{Magnitude, Scalar};

/// `ν_λ(x) = Σ |λ_g| λ^{L(g)}`.
pub fn nu_lambda(group: &Group, x: &AlgebraElement, lambda: &BigRational) -> Result<Magnitude> {
    if *lambda < BigRational::one() {
        return Err(Error::InvalidParameter(format!("λ = {lambda} must be ≥ 1")));
    }
    Ok(x.terms().fold(Magnitude::zero(), |acc, (g, c)| {
        acc.add(&c.abs().scale(&weight_power(lambda, group.word_length(g))))
    }))
}

#[derive(Clone, Debug)]
pub struct ReducedNormOptions {
    /// Initial torus grid cells per axis (free abelian groups).
    pub resolution: u32,
    /// Target enclosure width for the torus search.
    pub tolerance: f64,
    /// Budget of trigonometric-polynomial evaluations.
    pub max_evaluations: usize,
}

impl Default for ReducedNormOptions {
    fn default() -> Self {
        ReducedNormOptions {
            resolution: 64,
            tolerance: 1e-9,
            max_evaluations: 4_000_000,
        }
    }
}

/// `‖x‖_r`, the operator norm of `x` in the left regular representation.
pub fn reduced_norm(group: &Group, x: &AlgebraElement, resolution: u32) -> Result<Magnitude> {
    reduced_norm_with(
        group,
        x,
        &ReducedNormOptions {
            resolution,
            ..Default::default()
        },
    )
}

pub fn reduced_norm_with(
    group: &Group,
    x: &AlgebraElement,
    opts: &ReducedNormOptions,
) -> Result<Magnitude> {
    if group.kind() == GroupKind::Free {
        return Err(Error::Unsupported("reduced C*-norm on a free group".into()));
    }
    if opts.resolution == 0 {
        return Err(Error::InvalidParameter(
            "resolution must be positive".into(),
        ));
    }
    if x.is_empty() {
        return Ok(Magnitude::zero());
    }
    if let Some(exact) = common_phase_norm(x) {
        return Ok(exact);
    }
    let est = match group.kind() {
        GroupKind::FiniteTable => finite_operator_norm(group, x),
        GroupKind::FreeAbelian => torus_sup(x, opts)?,
        GroupKind::Free => unreachable!(),
    };
    Ok(capped_at_nu1(x, est))
}

/// `‖x‖_r ≤ ν₁(x)` always, so the enclosure can be clipped there.
fn capped_at_nu1(x: &AlgebraElement, est: Magnitude) -> Magnitude {
    let nu1 = x
        .terms()
        .fold(Magnitude::zero(), |acc, (_, c)| acc.add(&c.abs()));
    let cap = nu1.hi();
    if est.hi() <= cap {
        return est;
    }
    let lo = est.lo().min(cap).clone();
    Magnitude::enclosure(lo, cap.clone())
}

/// If `λ_g = r_g·u` with every `r_g ≥ 0` then the constant vector is a
/// Perron eigenvector of `|λ(x)|`, and for amenable groups
/// `‖x‖_r = |u|·Σ r_g = Σ|λ_g|`.
fn common_phase_norm(x: &AlgebraElement) -> Option<Magnitude> {
    let (_, unit) = x.terms().next()?;
    let mut total = BigRational::zero();
    for (_, c) in x.terms() {
        total += c.nonneg_ratio_to(unit)?;
    }
    Some(unit.abs().scale(&total))
}

fn to_complex(c: &Scalar) -> Complex<f64> {
    Complex::new(
        c.re().to_f64().unwrap_or(f64::NAN),
        c.im().to_f64().unwrap_or(f64::NAN),
    )
}

fn l1_upper(x: &AlgebraElement) -> f64 {
    x.terms().map(|(_, c)| to_complex(c).norm()).sum()
}

fn finite_operator_norm(group: &Group, x: &AlgebraElement) -> Magnitude {
    let n = group.order().expect("finite group");
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for (g, c) in x.terms() {
        let c = to_complex(c);
        for h in 0..n as u32 {
            let h = GroupElement::Index(h);
            let GroupElement::Index(gh) = group.multiply(g, &h) else {
                unreachable!()
            };
            let GroupElement::Index(col) = h else {
                unreachable!()
            };
            m[(gh as usize, col as usize)] += c;
        }
    }
    let sigma = m.singular_values().max();
    let l1 = l1_upper(x);
    // backward-stable SVD plus coefficient rounding
    let err = (n as f64 * 64.0 * f64::EPSILON + 1e-15) * l1.max(1.0);
    Magnitude::from_f64_with_error(sigma, err)
}

struct Cell {
    upper: f64,
    center: Vec<f64>,
    half: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper.total_cmp(&other.upper) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

/// `sup_θ |Σ λ_g e^{2πi⟨g,θ⟩}|` on `[0,1)^k` by branch-and-bound.
///
/// On a cell of sup-radius `h` around `c` each term's phase moves by at most
/// `2π‖g‖₁h`, so `|p(c+δ)| ≤ |p(c) + Dp(c)δ| + ½(2π)²Σ|λ_g|‖g‖₁² h²`. The
/// linear part is convex in δ and peaks at a corner of the cell. The plain
/// Lipschitz bound `|p(c)| + 2πΣ|λ_g|‖g‖₁ h` is used when it is smaller.
fn torus_sup(x: &AlgebraElement, opts: &ReducedNormOptions) -> Result<Magnitude> {
    let terms: Vec<(Complex<f64>, Vec<f64>)> = x
        .terms()
        .map(|(g, c)| match g {
            GroupElement::Vector(v) => (to_complex(c), v.iter().map(|&a| a as f64).collect()),
            _ => unreachable!("free abelian element"),
        })
        .collect();
    let k = terms[0].1.len();
    let l1 = |v: &[f64]| v.iter().map(|a| a.abs()).sum::<f64>();
    let lip = TAU * terms.iter().map(|(c, v)| c.norm() * l1(v)).sum::<f64>();
    let curvature = 0.5
        * TAU
        * TAU
        * terms
            .iter()
            .map(|(c, v)| c.norm() * l1(v).powi(2))
            .sum::<f64>();
    let slack = 1e-12 * l1_upper(x).max(1.0);

    // value, gradient and the cell bound at `center`
    let probe = |center: Vec<f64>, half: f64| -> (f64, Cell) {
        let mut value = Complex::new(0.0, 0.0);
        let mut grad = vec![Complex::new(0.0, 0.0); k];
        for (c, v) in &terms {
            let phase = TAU * v.iter().zip(&center).map(|(a, t)| a * t).sum::<f64>();
            let term = c * Complex::new(phase.cos(), phase.sin());
            value += term;
            for (d, a) in v.iter().enumerate() {
                grad[d] += term * Complex::new(0.0, TAU * a);
            }
        }
        let corner_max = (0..1usize << k)
            .map(|corner| {
                let shift: Complex<f64> = grad
                    .iter()
                    .enumerate()
                    .map(|(d, g)| {
                        if corner >> d & 1 == 1 {
                            g * half
                        } else {
                            -g * half
                        }
                    })
                    .sum();
                (value + shift).norm()
            })
            .fold(0.0, f64::max);
        let v = value.norm();
        let upper = (corner_max + curvature * half * half).min(v + lip * half);
        (
            v,
            Cell {
                upper,
                center,
                half,
            },
        )
    };

    if k == 0 {
        let (v, _) = probe(Vec::new(), 0.0);
        return Ok(Magnitude::from_f64_with_error(v, slack));
    }
    let res = opts.resolution as usize;
    let initial = res
        .checked_pow(k as u32)
        .filter(|&c| c <= opts.max_evaluations)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "initial grid {res}^{k} exceeds the evaluation budget"
            ))
        })?;

    let mut heap = BinaryHeap::with_capacity(initial);
    let mut best = 0.0f64;
    let half0 = 0.5 / res as f64;
    let mut idx = vec![0usize; k];
    for _ in 0..initial {
        let center: Vec<f64> = idx.iter().map(|&i| (i as f64 + 0.5) / res as f64).collect();
        let (v, cell) = probe(center, half0);
        best = best.max(v);
        heap.push(cell);
        for d in idx.iter_mut() {
            *d += 1;
            if *d < res {
                break;
            }
            *d = 0;
        }
    }
    let mut evaluations = initial;
    let upper = loop {
        let top = heap.pop().expect("nonempty search heap");
        if top.upper - best <= opts.tolerance || evaluations >= opts.max_evaluations || lip == 0.0 {
            break top.upper;
        }
        let half = top.half / 2.0;
        for corner in 0..(1usize << k) {
            let center: Vec<f64> = top
                .center
                .iter()
                .enumerate()
                .map(|(d, c)| {
                    if corner >> d & 1 == 1 {
                        c + half
                    } else {
                        c - half
                    }
                })
                .collect();
            let (v, cell) = probe(center, half);
            best = best.max(v);
            heap.push(cell);
        }
        evaluations += 1 << k;
    };
    let lo = BigRational::from_float((best - slack).max(0.0)).unwrap_or_else(BigRational::zero);
    let hi = BigRational::from_float(upper.max(best) + slack).expect("finite bound");
    Ok(Magnitude::enclosure(lo, hi))
}

/// `‖x‖_max = ‖ |x| ‖_r`.
pub fn amax_seminorm(group: &Group, x: &AlgebraElement, resolution: u32) -> Result<Magnitude> {
    match x.abs_coefficients() {
        Some(ax) => reduced_norm(group, &ax, resolution),
        None => {
            if group.kind() == GroupKind::Free {
                return Err(Error::Unsupported("reduced C*-norm on a free group".into()));
            }
            // |x| is nonnegative, so its norm is Σ|λ_g| (Perron certificate).
            Ok(x.terms()
                .fold(Magnitude::zero(), |acc, (_, c)| acc.add(&c.abs())))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeminormKind {
    /// Weighted ℓ¹ norm `ν_λ`.
    NuLambda(BigRational),
    /// `‖·‖_max = ‖|·|‖_r`.
    Max { resolution: u32 },
    /// `‖·‖_r`, not unconditional; the control case.
    Reduced { resolution: u32 },
}

impl SeminormKind {
    pub fn evaluate(&self, group: &Group, x: &AlgebraElement) -> Result<Magnitude> {
        match self {
            SeminormKind::NuLambda(l) => nu_lambda(group, x, l),
            SeminormKind::Max { resolution } => amax_seminorm(group, x, *resolution),
            SeminormKind::Reduced { resolution } => reduced_norm(group, x, *resolution),
        }
    }

    pub fn name(&self) -> String {
        match self {
            SeminormKind::NuLambda(l) => format!("nu_{l}"),
            SeminormKind::Max { .. } => "max".into(),
            SeminormKind::Reduced { .. } => "reduced".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UnconditionalViolation {
    pub sample: usize,
    /// `absolute` (η(x) ≠ η(|x|)) or `monotone` (η(x) > η(x′) under domination).
    pub property: &'static str,
    pub left: Magnitude,
    pub right: Magnitude,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnconditionalReport {
    pub seminorm: String,
    pub samples: usize,
    pub absolute_checked: usize,
    pub monotone_checked: usize,
    /// Comparisons the enclosures could not decide.
    pub undecided: usize,
    pub violations: Vec<UnconditionalViolation>,
}

impl UnconditionalReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.undecided == 0
    }
}

fn dominated(x: &AlgebraElement, y: &AlgebraElement) -> bool {
    x.terms()
        .all(|(g, c)| c.norm_sqr() <= y.coefficient(g).norm_sqr())
}

fn abs_element_for(x: &AlgebraElement) -> Result<AlgebraElement> {
    x.abs_coefficients()
        .ok_or_else(|| Error::InvalidParameter("coefficient moduli must be rational".into()))
}

/// Checks `η(x) = η(|x|)` and, where `|x| ≤ |x′|` coefficientwise,
/// `η(x) ≤ η(x′)` on each sample pair. Violations are report content.
pub fn check_unconditional(
    group: &Group,
    seminorm: &SeminormKind,
    samples: &[(AlgebraElement, AlgebraElement)],
) -> Result<UnconditionalReport> {
    let mut report = UnconditionalReport {
        seminorm: seminorm.name(),
        samples: samples.len(),
        absolute_checked: 0,
        monotone_checked: 0,
        undecided: 0,
        violations: Vec::new(),
    };
    for (i, (x, x2)) in samples.iter().enumerate() {
        let vx = seminorm.evaluate(group, x)?;
        let vabs = seminorm.evaluate(group, &abs_element_for(x)?)?;
        report.absolute_checked += 1;
        match vx.certain_cmp(&vabs) {
            Some(Ordering::Equal) => {}
            Some(_) => report.violations.push(UnconditionalViolation {
                sample: i,
                property: "absolute",
                left: vx.clone(),
                right: vabs,
            }),
            None => {
                // overlapping enclosures: a difference below the resolution
                // is not a witness
                report.undecided += 1;
            }
        }
        if dominated(x, x2) {
            report.monotone_checked += 1;
            let vy = seminorm.evaluate(group, x2)?;
            match vx.certain_le(&vy) {
                Some(true) => {}
                Some(false) => report.violations.push(UnconditionalViolation {
                    sample: i,
                    property: "monotone",
                    left: vx,
                    right: vy,
                }),
                None => report.undecided += 1,
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Group;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn z_poly(coeffs: &[(i64, i64)]) -> AlgebraElement {
        AlgebraElement::from_terms(
            coeffs
                .iter()
                .map(|&(k, c)| (GroupElement::Vector(vec![k]), Scalar::from_int(c))),
        )
    }

    #[test]
    fn nu_lambda_examples() {
        let f2 = Group::free(2).unwrap();
        let p = |s| f2.parse_element(s).unwrap();
        for w in ["e", "a", "a b A"] {
            let g = p(w);
            let v = nu_lambda(&f2, &AlgebraElement::delta(g.clone()), &q(3, 2)).unwrap();
            assert_eq!(
                v,
                Magnitude::Exact(weight_power(&q(3, 2), f2.word_length(&g)))
            );
        }
        let x = AlgebraElement::from_terms([
            (p("a"), Scalar::from_int(2)),
            (p("a b"), Scalar::from_int(3)),
        ]);
        assert_eq!(
            nu_lambda(&f2, &x, &q(2, 1)).unwrap(),
            Magnitude::from_int(16)
        );
        assert_eq!(
            nu_lambda(&f2, &x, &q(1, 1)).unwrap(),
            Magnitude::from_int(5)
        );
        assert!(nu_lambda(&f2, &x, &q(1, 2)).is_err());
    }

    #[test]
    fn reduced_norm_examples() {
        let z2 = Group::cyclic(2).unwrap();
        let (e, t) = (z2.identity(), GroupElement::Index(1));
        for g in [&e, &t] {
            assert_eq!(
                reduced_norm(&z2, &AlgebraElement::delta(g.clone()), 8).unwrap(),
                Magnitude::from_int(1)
            );
        }
        let sum =
            AlgebraElement::from_terms([(e.clone(), Scalar::one()), (t.clone(), Scalar::one())]);
        assert_eq!(reduced_norm(&z2, &sum, 8).unwrap(), Magnitude::from_int(2));
        // eigenvalues of [[1,-1],[-1,1]] are {0, 2}
        let diff = AlgebraElement::from_terms([(e, Scalar::one()), (t, Scalar::from_int(-1))]);
        let r = reduced_norm(&z2, &diff, 8).unwrap();
        assert!(r.lo() <= &q(2, 1) && r.hi() >= &q(2, 1));
        assert!(r.width() < q(1, 1_000_000_000));

        let z = Group::free_abelian(1).unwrap();
        let x = z_poly(&[(0, 1), (1, -1), (2, -1)]);
        let r = reduced_norm(&z, &x, 16).unwrap();
        let five = q(5, 1);
        assert!(r.lo() * r.lo() <= five && r.hi() * r.hi() >= five, "{r}");
        assert!(r.width() <= q(1, 1_000_000));
        assert_eq!(amax_seminorm(&z, &x, 16).unwrap(), Magnitude::from_int(3));

        let f2 = Group::free(2).unwrap();
        assert!(reduced_norm(&f2, &AlgebraElement::delta(f2.identity()), 4).is_err());
    }

    #[test]
    fn dense_grid_oracle_agrees_on_torus() {
        // independent oracle: dense grid max of |1 - z - z²| (= √5 at θ = 1/4)
        let grid_max = (0..200_000)
            .map(|i| {
                let th = TAU * i as f64 / 200_000.0;
                let z = Complex::new(th.cos(), th.sin());
                (Complex::new(1.0, 0.0) - z - z * z).norm()
            })
            .fold(0.0, f64::max);
        let z = Group::free_abelian(1).unwrap();
        let r = reduced_norm(&z, &z_poly(&[(0, 1), (1, -1), (2, -1)]), 8).unwrap();
        assert!((r.midpoint_f64() - grid_max).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional_torus() {
        let z2 = Group::free_abelian(2).unwrap();
        let p = |s| z2.parse_element(s).unwrap();
        let x = AlgebraElement::from_terms([
            (p("e"), Scalar::one()),
            (p("a"), Scalar::from_int(-1)),
            (p("b"), Scalar::i()),
        ]);
        let r = reduced_norm(&z2, &x, 16).unwrap();
        // all three unit phases align at θ = (1/2, 3/4): 1 + 1 + 1 = 3
        assert!(r.lo() <= &q(3, 1) && r.hi() >= &q(3, 1), "{r}");
        assert!(r.width() < q(1, 1_000_000));
    }

    #[test]
    fn unconditional_checks() {
        let z2 = Group::cyclic(2).unwrap();
        let (e, t) = (z2.identity(), GroupElement::Index(1));
        let diff = AlgebraElement::from_terms([
            (e.clone(), Scalar::one()),
            (t.clone(), Scalar::from_int(-1)),
        ]);
        let sum = AlgebraElement::from_terms([(e, Scalar::one()), (t, Scalar::one())]);
        assert_eq!(
            amax_seminorm(&z2, &diff, 4).unwrap(),
            Magnitude::from_int(2)
        );
        assert_eq!(
            amax_seminorm(&z2, &diff, 4).unwrap(),
            reduced_norm(&z2, &sum, 4).unwrap()
        );
        let rep = check_unconditional(
            &z2,
            &SeminormKind::Max { resolution: 4 },
            &[(diff.clone(), sum.clone())],
        )
        .unwrap();
        assert!(rep.passed(), "{rep:?}");
        let rep =
            check_unconditional(&z2, &SeminormKind::NuLambda(q(2, 1)), &[(diff, sum)]).unwrap();
        assert!(rep.passed());

        let z = Group::free_abelian(1).unwrap();
        let x = z_poly(&[(0, 1), (1, -1), (2, -1)]);
        let rep = check_unconditional(
            &z,
            &SeminormKind::Reduced { resolution: 16 },
            &[(x.clone(), x)],
        )
        .unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].property, "absolute");
    }

    #[test]
    fn irrational_moduli_use_enclosures() {
        let z3 = Group::cyclic(3).unwrap();
        let x = AlgebraElement::from_terms([
            (GroupElement::Index(0), Scalar::gaussian(1, 1)),
            (GroupElement::Index(1), Scalar::gaussian(1, -1)),
        ]);
        let m = amax_seminorm(&z3, &x, 4).unwrap();
        let eight = q(8, 1);
        assert!(m.lo() * m.lo() <= eight && m.hi() * m.hi() >= eight);
    }
}
