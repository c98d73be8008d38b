//! Exact nonnegative rational rates.
//!
//! Every quantity the logic compares (transition rates, modal indices, the
//! observational error) is a [`Rate`]. Differences that may go negative, such as
//! the slack of an order condition, are plain [`BigRational`] values.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors produced while reading a rate literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RateError {
    #[error("negative rate `{0}`")]
    Negative(String),
    #[error("malformed rate literal `{0}`")]
    Malformed(String),
}

/// A nonnegative exact rational.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rate(BigRational);

impl Rate {
    pub fn zero() -> Self {
        Rate(BigRational::zero())
    }

    pub fn from_integer(n: u64) -> Self {
        Rate(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`; panics on a zero denominator.
    pub fn from_ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rate(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Wraps a signed rational, rejecting negative values.
    pub fn try_from_ratio(value: BigRational) -> Result<Self, RateError> {
        if value.is_negative() {
            Err(RateError::Negative(format_ratio(&value)))
        } else {
            Ok(Rate(value))
        }
    }

    /// Clamps a signed rational at zero.
    pub fn clamp_ratio(value: BigRational) -> Self {
        if value.is_negative() {
            Rate::zero()
        } else {
            Rate(value)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    /// Truncated subtraction `max(0, self - other)`.
    pub fn monus(&self, other: &Rate) -> Rate {
        Rate::clamp_ratio(&self.0 - &other.0)
    }

    /// `self - other` when the result stays nonnegative.
    pub fn checked_sub(&self, other: &Rate) -> Option<Rate> {
        if self >= other {
            Some(Rate(&self.0 - &other.0))
        } else {
            None
        }
    }

    /// Signed difference `self - other`.
    pub fn diff(&self, other: &Rate) -> BigRational {
        &self.0 - &other.0
    }

    /// Halfway point between two rates.
    pub fn midpoint(&self, other: &Rate) -> Rate {
        Rate((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn div_int(&self, n: u64) -> Rate {
        assert!(n != 0, "division by zero");
        Rate(&self.0 / BigRational::from_integer(BigInt::from(n)))
    }

    pub fn mul_int(&self, n: u64) -> Rate {
        Rate(&self.0 * BigRational::from_integer(BigInt::from(n)))
    }
}

fn format_ratio(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_ratio(&self.0))
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rate({self})")
    }
}

/// Parses `"3"`, `"0.25"`, `"3/2"`. Decimals convert exactly.
impl FromStr for Rate {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let malformed = || RateError::Malformed(s.to_string());
        if text.is_empty() {
            return Err(malformed());
        }
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let value = if let Some((num, den)) = body.split_once('/') {
            let num = parse_digits(num).ok_or_else(malformed)?;
            let den = parse_digits(den).ok_or_else(malformed)?;
            if den.is_zero() {
                return Err(malformed());
            }
            BigRational::new(num, den)
        } else if let Some((int, frac)) = body.split_once('.') {
            if int.is_empty() && frac.is_empty() {
                return Err(malformed());
            }
            let int = if int.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(int).ok_or_else(malformed)?
            };
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let frac = if frac.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(frac).ok_or_else(malformed)?
            };
            BigRational::new(int * &scale + frac, scale)
        } else {
            BigRational::from_integer(parse_digits(body).ok_or_else(malformed)?)
        };
        if negative && !value.is_zero() {
            return Err(RateError::Negative(s.to_string()));
        }
        Ok(Rate(value))
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl Add for Rate {
    type Output = Rate;
    fn add(self, rhs: Rate) -> Rate {
        Rate(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rate> for &'a Rate {
    type Output = Rate;
    fn add(self, rhs: &Rate) -> Rate {
        Rate(&self.0 + &rhs.0)
    }
}

impl<'a> Add<&'a Rate> for Rate {
    type Output = Rate;
    fn add(self, rhs: &Rate) -> Rate {
        Rate(self.0 + &rhs.0)
    }
}

impl AddAssign<&Rate> for Rate {
    fn add_assign(&mut self, rhs: &Rate) {
        self.0 += &rhs.0;
    }
}

impl std::iter::Sum for Rate {
    fn sum<I: Iterator<Item = Rate>>(iter: I) -> Rate {
        iter.fold(Rate::zero(), |acc, r| acc + r)
    }
}

impl<'a> std::iter::Sum<&'a Rate> for Rate {
    fn sum<I: Iterator<Item = &'a Rate>>(iter: I) -> Rate {
        let mut acc = Rate::zero();
        for r in iter {
            acc += r;
        }
        acc
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and fixtures; panics on bad input.
pub fn rate(text: &str) -> Rate {
    text.parse()
        .unwrap_or_else(|e| panic!("bad rate literal {text:?}: {e}"))
}
