//! Textual forms of multi-word values.
//!
//! The exact form lists the FP64 components as C99 hexadecimal floats, e.g.
//! `(0x1.5555555555555p-2, 0x1.5555555555555p-56)`. The decimal form is for
//! display and goes through the exact oracle.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{DoubleWord, TripleWord};
use crate::oracle::ExactValue;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseHexError {
    #[error("invalid hexadecimal float `{0}`")]
    Invalid(String),
    #[error("expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
}

/// Formats `x` as an exact hexadecimal float.
pub fn format_hex_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let esign = if exp < 0 { '-' } else { '+' };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", exp.abs())
    }
}

/// Parses the output of [`format_hex_f64`]. Only exactly representable
/// values (at most 13 fraction digits, normalized or subnormal) are accepted.
pub fn parse_hex_f64(s: &str) -> Result<f64, ParseHexError> {
    let err = || ParseHexError::Invalid(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = match body {
        "nan" => f64::NAN,
        "inf" => f64::INFINITY,
        _ => {
            let body = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")).ok_or_else(err)?;
            let (mant, exp) = body.split_once(['p', 'P']).ok_or_else(err)?;
            let exp: i32 = exp.parse().map_err(|_| err())?;
            let (lead, frac) = mant.split_once('.').unwrap_or((mant, ""));
            if frac.len() > 13 || !frac.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(err());
            }
            let lead = match lead {
                "0" => 0u64,
                "1" => 1u64,
                _ => return Err(err()),
            };
            let frac_bits = if frac.is_empty() {
                0
            } else {
                u64::from_str_radix(frac, 16).map_err(|_| err())? << (4 * (13 - frac.len()))
            };
            match lead {
                0 if frac_bits == 0 => 0.0,
                0 if exp == -1022 => f64::from_bits(frac_bits),
                1 if (-1022..=1023).contains(&exp) => f64::from_bits((((exp + 1023) as u64) << 52) | frac_bits),
                _ => return Err(err()),
            }
        }
    };
    Ok(if neg { -value } else { value })
}

fn format_components(f: &mut fmt::Formatter<'_>, words: &[f64]) -> fmt::Result {
    f.write_str("(")?;
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&format_hex_f64(*w))?;
    }
    f.write_str(")")
}

fn parse_components<const N: usize>(s: &str) -> Result<[f64; N], ParseHexError> {
    let inner = s.trim();
    let inner = inner
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseHexError::Invalid(s.to_string()))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != N {
        return Err(ParseHexError::Arity { expected: N, found: parts.len() });
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = parse_hex_f64(p)?;
    }
    Ok(out)
}

impl fmt::Display for DoubleWord<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_components(f, &[self.w0, self.w1])
    }
}

impl fmt::Display for TripleWord<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_components(f, &[self.w0, self.w1, self.w2])
    }
}

impl FromStr for DoubleWord<f64> {
    type Err = ParseHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let [w0, w1] = parse_components::<2>(s)?;
        Ok(Self::new(w0, w1))
    }
}

impl FromStr for TripleWord<f64> {
    type Err = ParseHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let [w0, w1, w2] = parse_components::<3>(s)?;
        Ok(Self::new(w0, w1, w2))
    }
}

impl DoubleWord<f64> {
    /// Decimal rendering of the represented value with `digits` significant
    /// digits. Non-finite components render as `nan`/`inf`.
    pub fn to_decimal(&self, digits: usize) -> String {
        ExactValue::sum_f64(&[self.w0, self.w1])
            .map(|v| v.to_decimal(digits))
            .unwrap_or_else(|_| self.collapse().to_string())
    }
}

impl TripleWord<f64> {
    /// Decimal rendering of the represented value with `digits` significant
    /// digits. Non-finite components render as `nan`/`inf`.
    pub fn to_decimal(&self, digits: usize) -> String {
        ExactValue::sum_f64(&[self.w0, self.w1, self.w2])
            .map(|v| v.to_decimal(digits))
            .unwrap_or_else(|_| self.collapse().to_string())
    }
}
