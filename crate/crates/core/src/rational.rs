//! Exact rational numbers and their textual form.
//!
//! Rationals are written as `p/q` or as plain integers, in lowest terms.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn parse(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let value = Rational::from_str(trimmed).map_err(|_| Error::Parse(format!("`{text}` is not a rational number")))?;
    if value.denom().is_zero() {
        return Err(Error::Parse(format!("`{text}` has a zero denominator")));
    }
    Ok(value)
}

/// Canonical machine form: `p/q`, or `p` when the denominator is one.
pub fn to_string(value: &Rational) -> String {
    value.to_string()
}

/// Human form with a decimal approximation for non-integers.
pub fn to_display(value: &Rational) -> String {
    if value.is_integer() {
        value.to_string()
    } else {
        let approx = value.to_f64().unwrap_or(f64::NAN);
        format!("{value} (~{approx:.6})")
    }
}

pub fn sign(value: &Rational) -> i8 {
    if value.is_zero() {
        0
    } else if value.is_positive() {
        1
    } else {
        -1
    }
}

/// `K^exponent` as a rational.
pub fn pow(base: &Rational, exponent: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exponent {
        acc *= base;
    }
    acc
}
