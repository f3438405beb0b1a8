use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::multiword::{DoubleWord, TripleWord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("non-finite value {0} has no exact dyadic image")]
    NonFinite(f64),
}

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Canonical form: the mantissa is odd, or zero with exponent 0. Equality is
/// therefore structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactValue {
    mantissa: BigInt,
    exponent: i64,
}

impl ExactValue {
    pub fn zero() -> Self {
        Self { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn from_parts(mantissa: BigInt, exponent: i64) -> Self {
        let mut v = Self { mantissa, exponent };
        v.canonicalize();
        v
    }

    fn canonicalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz;
                self.exponent += tz as i64;
            }
        }
    }

    /// Exact image of a finite FP64 value.
    pub fn from_f64(x: f64) -> Result<Self, OracleError> {
        if !x.is_finite() {
            return Err(OracleError::NonFinite(x));
        }
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 { (frac, -1074) } else { (frac | (1u64 << 52), biased - 1075) };
        let m = BigInt::from(m);
        Ok(Self::from_parts(if x.is_sign_negative() { -m } else { m }, e))
    }

    /// Exact sum of FP64 values.
    pub fn sum_f64(xs: &[f64]) -> Result<Self, OracleError> {
        xs.iter().try_fold(Self::zero(), |acc, &x| Ok(&acc + &Self::from_f64(x)?))
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// `self * 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// Exponent of the leading bit: `2^t <= |self| < 2^(t+1)`. None for zero.
    pub fn top_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.mantissa.bits() as i64 - 1 + self.exponent)
    }

    /// Round to the nearest FP64, ties to even. Overflow gives a signed
    /// infinity; tiny values round into the subnormal range or to zero.
    pub fn to_f64(&self) -> f64 {
        let Some(top) = self.top_exponent() else { return 0.0 };
        let neg = self.signum() < 0;
        let signed = |mag: f64| if neg { -mag } else { mag };
        if top > 1024 {
            return signed(f64::INFINITY);
        }
        // quantum of the result: 2^q
        let q = (top - 52).max(-1074);
        let m = self.mantissa.magnitude();
        let rounded: u64 = if self.exponent >= q {
            let v = m << (self.exponent - q) as usize;
            v.iter_u64_digits().next().unwrap_or(0)
        } else {
            let shift = (q - self.exponent) as usize;
            if shift > m.bits() as usize + 1 {
                0
            } else {
                let kept = m >> shift;
                let rem = m - (&kept << shift);
                let half = num_bigint::BigUint::one() << (shift - 1);
                let mut r = kept.iter_u64_digits().next().unwrap_or(0);
                match rem.cmp(&half) {
                    Ordering::Greater => r += 1,
                    Ordering::Equal if r & 1 == 1 => r += 1,
                    _ => {}
                }
                r
            }
        };
        // rounded * 2^q with rounded <= 2^53
        let (mut r, mut q) = (rounded, q);
        if r == 1u64 << 53 {
            r >>= 1;
            q += 1;
        }
        if r == 0 {
            return signed(0.0);
        }
        if r >= 1u64 << 52 {
            let biased = q + 52 + 1023;
            if biased >= 0x7ff {
                return signed(f64::INFINITY);
            }
            signed(f64::from_bits(((biased as u64) << 52) | (r & ((1u64 << 52) - 1))))
        } else {
            // subnormal, q == -1074
            debug_assert_eq!(q, -1074);
            signed(f64::from_bits(r))
        }
    }

    /// Decimal scientific rendering with `digits` significant digits, rounded
    /// half to even.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            let frac = "0".repeat(digits - 1);
            return if frac.is_empty() { "0e0".into() } else { format!("0.{frac}e0") };
        }
        let sign = if self.signum() < 0 { "-" } else { "" };
        // |v| = num / den
        let mag = BigInt::from(self.mantissa.magnitude().clone());
        let (num, den) = if self.exponent >= 0 {
            (mag << self.exponent as usize, BigInt::one())
        } else {
            (mag, BigInt::one() << (-self.exponent) as usize)
        };
        let ten = BigInt::from(10);
        let top = self.top_exponent().unwrap_or(0);
        let mut k = (top as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let pow10 = |e: i64| ten.pow(e.unsigned_abs() as u32);
        // adjust k so that 10^k <= |v| < 10^(k+1)
        let ge = |k: i64| -> bool {
            if k >= 0 {
                num >= &den * pow10(k)
            } else {
                &num * pow10(k) >= den
            }
        };
        while !ge(k) {
            k -= 1;
        }
        while ge(k + 1) {
            k += 1;
        }
        let scale = digits as i64 - 1 - k;
        let (n, d) = if scale >= 0 { (&num * pow10(scale), den.clone()) } else { (num.clone(), &den * pow10(scale)) };
        let (mut q, r) = n.div_rem(&d);
        let twice: BigInt = &r * 2u32;
        match twice.cmp(&d) {
            Ordering::Greater => q += 1,
            Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        let mut text = q.to_string();
        if text.len() > digits {
            text.pop();
            k += 1;
        }
        let (lead, rest) = text.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{k}")
        } else {
            format!("{sign}{lead}.{rest}e{k}")
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * 2^{}", self.mantissa, self.exponent)
    }
}

impl Add for &ExactValue {
    type Output = ExactValue;

    fn add(self, rhs: &ExactValue) -> ExactValue {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &rhs.mantissa << (rhs.exponent - e) as usize;
        ExactValue::from_parts(a + b, e)
    }
}

impl Sub for &ExactValue {
    type Output = ExactValue;

    fn sub(self, rhs: &ExactValue) -> ExactValue {
        self + &(-rhs)
    }
}

impl Mul for &ExactValue {
    type Output = ExactValue;

    fn mul(self, rhs: &ExactValue) -> ExactValue {
        ExactValue::from_parts(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &ExactValue {
    type Output = ExactValue;

    fn neg(self) -> ExactValue {
        ExactValue { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExactValue {
            type Output = ExactValue;
            fn $m(self, rhs: ExactValue) -> ExactValue {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ExactValue {
    type Output = ExactValue;

    fn neg(self) -> ExactValue {
        -&self
    }
}

impl Ord for ExactValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact value of a number or multi-word representation.
pub trait ToExact {
    fn try_exact(&self) -> Result<ExactValue, OracleError>;

    /// Panics on non-finite components.
    fn exact(&self) -> ExactValue {
        self.try_exact().expect("exact value of a non-finite number")
    }
}

impl ToExact for f64 {
    fn try_exact(&self) -> Result<ExactValue, OracleError> {
        ExactValue::from_f64(*self)
    }
}

impl ToExact for DoubleWord<f64> {
    fn try_exact(&self) -> Result<ExactValue, OracleError> {
        ExactValue::sum_f64(&[self.w0, self.w1])
    }
}

impl ToExact for TripleWord<f64> {
    fn try_exact(&self) -> Result<ExactValue, OracleError> {
        ExactValue::sum_f64(&[self.w0, self.w1, self.w2])
    }
}

/// `|approx - exact| / |exact|` as an FP64 number (0 when both are zero,
/// infinity when only `exact` is zero).
pub fn relative_error(approx: &ExactValue, exact: &ExactValue) -> f64 {
    let diff = approx - exact;
    match exact.top_exponent() {
        None if diff.is_zero() => 0.0,
        None => f64::INFINITY,
        Some(t) => diff.mul_pow2(-t).abs().to_f64() / exact.mul_pow2(-t).abs().to_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(x: f64) -> ExactValue {
        ExactValue::from_f64(x).unwrap()
    }

    #[test]
    fn from_f64_examples() {
        let one = ev(1.0);
        assert_eq!((one.signum(), one.mantissa().clone(), one.exponent()), (1, BigInt::from(1), 0));
        let q = ev(0.75);
        assert_eq!((q.mantissa().clone(), q.exponent()), (BigInt::from(3), -2));
        let u = ev(2f64.powi(-53));
        assert_eq!((u.mantissa().clone(), u.exponent()), (BigInt::from(1), -53));
        assert_eq!(ev(-0.0), ExactValue::zero());
        assert_eq!(
            ExactValue::from_f64(f64::NAN).unwrap_err().to_string(),
            "non-finite value NaN has no exact dyadic image"
        );
        assert!(ExactValue::from_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn field_operations() {
        let t = ev(0.1);
        assert_eq!(&t + &t, &t * &ev(2.0));
        let (a, b, c) = (ev(1e300), ev(-3.0e-200), ev(7.5));
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&a - &a, ExactValue::zero());
        assert!(b < c && c < a);
        assert_eq!((-&b).signum(), 1);
    }

    #[test]
    fn rounding_examples() {
        let u = ev(2f64.powi(-53));
        assert_eq!((&ev(1.0) + &u).to_f64(), 1.0);
        // 1 + 1.5 * 2^-52 sits exactly between 1 + 2^-52 and 1 + 2^-51
        let x = &ev(1.0) + &ev(1.5 * 2f64.powi(-52));
        assert_eq!(x.to_f64(), 1.0 + 2f64.powi(-51));
        assert_eq!(ExactValue::from_parts(BigInt::from(1), 1024).to_f64(), f64::INFINITY);
        assert_eq!(ExactValue::from_parts(BigInt::from(-1), 1024).to_f64(), f64::NEG_INFINITY);
        // half of the smallest subnormal rounds to zero, three halves to two
        assert_eq!(ExactValue::from_parts(BigInt::from(1), -1075).to_f64(), 0.0);
        assert_eq!(ExactValue::from_parts(BigInt::from(3), -1075).to_f64(), f64::from_bits(2));
        // rounding up across a binade
        let y = &ev(2.0 - f64::EPSILON) + &ev(f64::EPSILON / 2.0);
        assert_eq!(y.to_f64(), 2.0);
    }

    #[test]
    fn rounding_matches_independent_bit_check() {
        // 1 + 1.5 * 2^-52: bits of 1 + 2^-51 have mantissa field 2
        let x = &ev(1.0) + &ev(1.5 * 2f64.powi(-52));
        assert_eq!(x.to_f64().to_bits() & ((1 << 52) - 1), 2);
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(ev(1.0).to_decimal(1), "1e0");
        assert_eq!(ev(0.1).to_decimal(20), "1.0000000000000000555e-1");
        assert_eq!(ev(-1234.5).to_decimal(4), "-1.234e3");
        assert_eq!(ev(9.99).to_decimal(2), "1.0e1");
        assert_eq!(ExactValue::zero().to_decimal(3), "0.00e0");
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(&ev(1.0), &ev(1.0)), 0.0);
        assert_eq!(relative_error(&ev(1.5), &ev(1.0)), 0.5);
        assert_eq!(relative_error(&ev(1.0), &ExactValue::zero()), f64::INFINITY);
        let tiny = &ev(1.0) + &ExactValue::from_parts(BigInt::from(1), -200);
        assert_eq!(relative_error(&tiny, &ev(1.0)), 2f64.powi(-200));
    }

    fn finite() -> impl Strategy<Value = f64> {
        any::<u64>().prop_map(f64::from_bits).prop_filter("finite", |x| x.is_finite())
    }

    proptest! {
        #[test]
        fn roundtrip_through_exact(x in finite()) {
            prop_assert_eq!(ev(x).to_f64().to_bits(), if x == 0.0 { 0.0f64.to_bits() } else { x.to_bits() });
        }

        #[test]
        fn agrees_with_fp64_when_exact(a in -1.0e6f64..1.0e6, b in -1.0e6f64..1.0e6) {
            let s = a + b;
            if (s - a) == b && (s - b) == a {
                prop_assert_eq!(ev(s), &ev(a) + &ev(b));
            }
            let sum = &ev(a) + &ev(b);
            prop_assert_eq!(sum.to_f64(), s);
            let prod = &ev(a) * &ev(b);
            prop_assert_eq!(prod.to_f64(), a * b);
        }
    }
}
