//! Exact rational thresholds.
//!
//! Thresholds such as the gap factor and the anomaly fraction are compared
//! against integer tick counts. Keeping them as rationals makes boundary
//! cases (a fraction of exactly 0.7, a gap of exactly three periods) decide
//! the same way on every platform.

use std::fmt;

use thiserror::Error;

/// Ratio of two `i64`s, always kept in lowest terms with a positive denominator.
pub type Ratio = num_rational::Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a decimal or fraction (expected e.g. `3`, `0.7` or `7/10`)")]
pub struct RatioParseError(pub String);

/// Parse `"3"`, `"0.7"`, `"1.25"` or `"7/10"` into an exact ratio.
pub fn parse_ratio(text: &str) -> Result<Ratio, RatioParseError> {
    let err = || RatioParseError(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| err())?;
        let den: i64 = den.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        return Ok(Ratio::new(num, den));
    }
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    if frac_part.len() > 18 {
        return Err(err());
    }
    let den = 10i64.pow(frac_part.len() as u32);
    let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| err())? };
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| err())? };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(err)?;
    Ok(Ratio::new(if negative { -num } else { num }, den))
}

/// `value > ratio × base`, evaluated without rounding.
pub fn exceeds(value: i64, ratio: Ratio, base: i64) -> bool {
    value as i128 * *ratio.denom() as i128 > *ratio.numer() as i128 * base as i128
}

/// Lossy conversion for display and for float arithmetic downstream.
pub fn to_f64(ratio: Ratio) -> f64 {
    *ratio.numer() as f64 / *ratio.denom() as f64
}

/// Decimal rendering used in diagnostics (`7/10` prints as `0.7`).
pub struct Display(pub Ratio);

impl fmt::Display for Display {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}", to_f64(self.0))
        }
    }
}
