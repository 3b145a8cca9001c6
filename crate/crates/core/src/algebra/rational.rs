//! Exact rational scalars.

use alloc::string::String;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers. Panics when `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses a decimal literal (`12`, `0.25`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut digits = String::from(whole);
    digits.push_str(frac);
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let mut denom = BigInt::one();
    for _ in 0..frac.len() {
        denom *= 10;
    }
    Some(Rational::new(numer, denom))
}

/// Lossy conversion used only by the numeric (Kalman) path and diagnostics.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge operands: scale both down by a common power of two.
            let bits = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> bits).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> bits).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub(crate) fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}
