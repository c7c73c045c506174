//! Exact and floating-point scalars shared by every module, and their text forms.
//!
//! Exact values always travel as reduced [`BigRational`]s and serialize as
//! `"num/den"` strings (`"3"` for integers). Floating values serialize as JSON
//! numbers.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::LogValue;

pub type ExactRational = BigRational;

/// Parses `"num/den"`, `"int"` or a plain decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal literal {text:?}")));
        }
        let mut num: BigInt = digits.parse().expect("validated digits");
        if negative {
            num = -num;
        }
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational literal {text:?}")))?;
    Ok(BigRational::from_integer(num))
}

pub fn format_rational(value: &BigRational) -> String {
    value.to_string()
}

/// Best-effort conversion of an exact rational to the nearest `f64`.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub(crate) fn ratio_of(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn int(value: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// A real number computed by either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => rational_to_f64(r),
            Real::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(r) => r.is_zero(),
            Real::Float(x) => *x == 0.0,
        }
    }

    pub fn zero_like(&self) -> Real {
        match self {
            Real::Exact(_) => Real::Exact(BigRational::zero()),
            Real::Float(_) => Real::Float(0.0),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{r}"),
            Real::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(r) => serializer.serialize_str(&format_rational(r)),
            Real::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

/// A probability from the exact backend or the log-space backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Log(LogValue),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => rational_to_f64(r),
            Probability::Log(l) => l.value(),
        }
    }

    /// Natural log of the value; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        match self {
            Probability::Exact(r) => LogValue::from_rational(r).ln(),
            Probability::Log(l) => l.ln(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Probability::Exact(r) => r.is_zero(),
            Probability::Log(l) => l.is_zero(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Log(_) => None,
        }
    }

    pub fn one_exact() -> Self {
        Probability::Exact(BigRational::one())
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{r}"),
            Probability::Log(l) => write!(f, "{}", l.value()),
        }
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Probability::Exact(r) => serializer.serialize_str(&format_rational(r)),
            Probability::Log(l) => serializer.serialize_f64(l.value()),
        }
    }
}

impl From<Probability> for Real {
    fn from(p: Probability) -> Self {
        match p {
            Probability::Exact(r) => Real::Exact(r),
            Probability::Log(l) => Real::Float(l.value()),
        }
    }
}

impl From<BigRational> for Real {
    fn from(r: BigRational) -> Self {
        Real::Exact(r)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}
