//! Exact Gaussian-rational scalars and certified nonnegative magnitudes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;

/// Binary digits carried by square-root and n-th root enclosures.
pub const ROOT_PRECISION_BITS: u64 = 128;

/// An element `re + im·i` of the field ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::real(BigRational::new(num.into(), den.into()))
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Scalar::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::gaussian(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`, always exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// The modulus `|s|`: exact whenever `re² + im²` is the square of a rational.
    pub fn abs(&self) -> Magnitude {
        if self.im.is_zero() {
            return Magnitude::Exact(self.re.abs());
        }
        if self.re.is_zero() {
            return Magnitude::Exact(self.im.abs());
        }
        Magnitude::sqrt(&self.norm_sqr())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Scalar::new(&self.re * r, &self.im * r)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        let d = rhs.norm_sqr();
        if d.is_zero() {
            return None;
        }
        let num = self * &rhs.conj();
        Some(Scalar::new(num.re / &d, num.im / d))
    }

    /// Real multiple `r ≥ 0` with `self = r · unit`, if one exists.
    pub fn nonneg_ratio_to(&self, unit: &Scalar) -> Option<BigRational> {
        let q = self.checked_div(unit)?;
        if q.im.is_zero() && !q.re.is_negative() {
            Some(q.re)
        } else {
            None
        }
    }
}

impl fmt::Display for Scalar {
    /// Canonical text form `p/q`, `p/q i` or `p/q+r/s i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{} i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{} i", self.re, -self.im.clone())
                } else {
                    write!(f, "{}+{} i", self.re, self.im)
                }
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serializes a rational as its exact `p/q` string.
pub fn serialize_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Scalar::real(parse_rational(&t)?));
        };
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let imag = |part: &str| -> Result<BigRational, Error> {
            match part {
                "" | "+" => Ok(BigRational::one()),
                "-" => Ok(-BigRational::one()),
                p => parse_rational(p.strip_prefix('+').unwrap_or(p)),
            }
        };
        match split {
            Some(i) => Ok(Scalar::new(parse_rational(&body[..i])?, imag(&body[i..])?)),
            None => Ok(Scalar::new(BigRational::zero(), imag(body)?)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re * &rhs.re);
        }
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::real(r)
    }
}

/// A nonnegative real quantity, either exact or enclosed in `[lo, hi]`
/// with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Magnitude {
    Exact(BigRational),
    Enclosure { lo: BigRational, hi: BigRational },
}

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude::Exact(BigRational::zero())
    }

    pub fn exact(r: BigRational) -> Self {
        Magnitude::Exact(r)
    }

    pub fn from_int(n: i64) -> Self {
        Magnitude::Exact(BigRational::from_integer(n.into()))
    }

    /// Interval constructor; collapses to `Exact` when the endpoints agree.
    pub fn enclosure(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        if lo == hi {
            Magnitude::Exact(lo)
        } else {
            Magnitude::Enclosure { lo, hi }
        }
    }

    /// Encloses an `f64` estimate with absolute error at most `err`.
    pub fn from_f64_with_error(value: f64, err: f64) -> Self {
        let lo = BigRational::from_float((value - err).max(0.0)).unwrap_or_else(BigRational::zero);
        let hi = BigRational::from_float(value + err).expect("finite estimate");
        Magnitude::enclosure(lo, hi)
    }

    /// `√r` for `r ≥ 0`; exact iff `r` is the square of a rational.
    pub fn sqrt(r: &BigRational) -> Self {
        Self::nth_root(r, 2)
    }

    /// `r^(1/k)` for `r ≥ 0`; exact iff `r` is a perfect `k`-th power.
    pub fn root(r: &BigRational, k: u32) -> Self {
        Self::nth_root(r, k.max(1))
    }

    fn nth_root(r: &BigRational, deg: u32) -> Self {
        assert!(!r.is_negative(), "root of a negative rational");
        if deg == 1 {
            return Magnitude::Exact(r.clone());
        }
        let (p, q) = (r.numer().clone(), r.denom().clone());
        let (pr, qr) = (p.nth_root(deg), q.nth_root(deg));
        if pr.pow(deg) == p && qr.pow(deg) == q {
            return Magnitude::Exact(BigRational::new(pr, qr));
        }
        // r^(1/deg) = (p q^(deg-1))^(1/deg) / q
        let scale = BigInt::one() << (ROOT_PRECISION_BITS as usize);
        let radicand = p * q.pow(deg - 1) * scale.pow(deg);
        let s = radicand.nth_root(deg);
        let den = q * scale;
        Magnitude::enclosure(
            BigRational::new(s.clone(), den.clone()),
            BigRational::new(s + 1, den),
        )
    }

    pub fn lo(&self) -> &BigRational {
        match self {
            Magnitude::Exact(v) => v,
            Magnitude::Enclosure { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &BigRational {
        match self {
            Magnitude::Exact(v) => v,
            Magnitude::Enclosure { hi, .. } => hi,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Magnitude::Exact(v) => Some(v),
            Magnitude::Enclosure { .. } => None,
        }
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((self.lo() + self.hi()) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.hi().is_zero()
    }

    pub fn add(&self, other: &Magnitude) -> Magnitude {
        Magnitude::enclosure(self.lo() + other.lo(), self.hi() + other.hi())
    }

    pub fn mul(&self, other: &Magnitude) -> Magnitude {
        Magnitude::enclosure(self.lo() * other.lo(), self.hi() * other.hi())
    }

    /// Multiplication by an exact `r ≥ 0`.
    pub fn scale(&self, r: &BigRational) -> Magnitude {
        debug_assert!(!r.is_negative());
        Magnitude::enclosure(self.lo() * r, self.hi() * r)
    }

    /// `self / other`; `None` when `other` may be zero.
    pub fn div(&self, other: &Magnitude) -> Option<Magnitude> {
        if !other.lo().is_positive() {
            return None;
        }
        Some(Magnitude::enclosure(
            self.lo() / other.hi(),
            self.hi() / other.lo(),
        ))
    }

    /// Interval-valued maximum.
    pub fn max(&self, other: &Magnitude) -> Magnitude {
        Magnitude::enclosure(
            self.lo().max(other.lo()).clone(),
            self.hi().max(other.hi()).clone(),
        )
    }

    /// Certified comparison: `Some` only when the enclosures decide it.
    pub fn certain_cmp(&self, other: &Magnitude) -> Option<Ordering> {
        if self.hi() < other.lo() {
            Some(Ordering::Less)
        } else if self.lo() > other.hi() {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// `Some(true)` if certainly `self ≤ other`, `Some(false)` if certainly not.
    pub fn certain_le(&self, other: &Magnitude) -> Option<bool> {
        if self.hi() <= other.lo() {
            Some(true)
        } else if self.lo() > other.hi() {
            Some(false)
        } else {
            None
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(v) => write!(f, "{v}"),
            Magnitude::Enclosure { lo, hi } => write!(
                f,
                "[{:.12e}, {:.12e}]",
                lo.to_f64().unwrap_or(f64::NAN),
                hi.to_f64().unwrap_or(f64::NAN)
            ),
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(1))?;
        match self {
            Magnitude::Exact(v) => map.serialize_entry("exact", &v.to_string())?,
            Magnitude::Enclosure { lo, hi } => map.serialize_entry(
                "enclosure",
                &EnclosureRecord {
                    lo: lo.to_string(),
                    hi: hi.to_string(),
                    width: (hi - lo).to_f64().unwrap_or(f64::NAN),
                    approx: ((lo + hi) / BigRational::from_integer(2.into()))
                        .to_f64()
                        .unwrap_or(f64::NAN),
                },
            )?,
        }
        map.end()
    }
}

#[derive(Serialize)]
struct EnclosureRecord {
    lo: String,
    hi: String,
    width: f64,
    approx: f64,
}

/// `base^exp` for a rational base and a signed exponent.
pub fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Least common multiple of the denominators of `re` and `im`.
pub(crate) fn denominator_lcm(s: &Scalar) -> BigInt {
    s.re.denom().lcm(s.im.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn field_operations() {
        let a = Scalar::new(q(1, 2), q(3, 4));
        let b = Scalar::gaussian(2, -1);
        let p = &a * &b;
        assert_eq!(p, Scalar::new(q(7, 4), q(1, 1)));
        assert_eq!(&(&p / &b), &a);
        assert_eq!(&a - &a, Scalar::zero());
        assert!(Scalar::zero().checked_div(&Scalar::zero()).is_none());
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn text_round_trip() {
        for text in ["0", "-3", "1/2", "1/2+3/4 i", "5-2 i", "-1/3 i", "i", "-i"] {
            let s: Scalar = text.parse().unwrap();
            let again: Scalar = s.to_string().parse().unwrap();
            assert_eq!(s, again, "{text}");
        }
        assert_eq!("2+i".parse::<Scalar>().unwrap(), Scalar::gaussian(2, 1));
        assert_eq!("-2-i".parse::<Scalar>().unwrap(), Scalar::gaussian(-2, -1));
        assert_eq!(
            "1/2+3/4 i".parse::<Scalar>().unwrap().to_string(),
            "1/2+3/4 i"
        );
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn modulus_exact_when_rational() {
        assert_eq!(Scalar::gaussian(3, 4).abs(), Magnitude::from_int(5));
        assert_eq!(Scalar::from_ratio(-2, 3).abs(), Magnitude::Exact(q(2, 3)));
        let m = Scalar::gaussian(1, 1).abs();
        assert!(!m.is_exact());
        let two = BigRational::from_integer(2.into());
        assert!(m.lo() * m.lo() <= two && m.hi() * m.hi() >= two);
        assert!(m.width() < q(1, 1 << 62));
    }

    #[test]
    fn roots() {
        assert_eq!(Magnitude::root(&q(9, 1), 2), Magnitude::Exact(q(3, 1)));
        assert_eq!(Magnitude::root(&q(8, 27), 3), Magnitude::Exact(q(2, 3)));
        let r = Magnitude::root(&q(2, 1), 3);
        let two = q(2, 1);
        assert!(num_traits::pow(r.lo().clone(), 3) <= two);
        assert!(num_traits::pow(r.hi().clone(), 3) >= two);
    }

    #[test]
    fn certified_comparisons() {
        let a = Magnitude::from_int(2);
        let b = Magnitude::sqrt(&q(5, 1));
        assert_eq!(a.certain_cmp(&b), Some(Ordering::Less));
        assert_eq!(b.certain_le(&Magnitude::from_int(3)), Some(true));
        assert_eq!(b.certain_le(&b), None);
        assert_eq!(a.certain_le(&a), Some(true));
    }
}
