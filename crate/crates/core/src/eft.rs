//! Error-free transformations on FP64.
//!
//! Each transformation returns the rounded result together with the exact
//! rounding error, so that `hi + lo` equals the real-valued result for finite,
//! non-overflowing inputs. NaN and infinities propagate according to IEEE-754
//! and are never trapped.
//!
//! The functions are generic over [`Scalar`] so the same code can run on
//! [`crate::oracle::CountingScalar`] to audit operation counts.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unit round-off of FP64 under round-to-nearest, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// The arithmetic interface every multi-word algorithm is written against.
///
/// `+`, `-`, `*`, `/` and [`Scalar::mul_add`] are the counted floating-point
/// operations. Negation, `abs` and comparisons are sign/branch work and are
/// not counted.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// `self * b + c` with a single rounding.
    fn mul_add(self, b: Self, c: Self) -> Self;

    #[inline(always)]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline(always)]
    fn abs(self) -> Self {
        Self::from_f64(self.to_f64().abs())
    }

    #[inline(always)]
    fn is_zero(self) -> bool {
        self.to_f64() == 0.0
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
}

impl Scalar for f64 {
    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline(always)]
    fn mul_add(self, b: Self, c: Self) -> Self {
        f64::mul_add(self, b, c)
    }

    #[inline(always)]
    fn abs(self) -> Self {
        f64::abs(self)
    }

    #[inline(always)]
    fn is_zero(self) -> bool {
        self == 0.0
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// A rounded result and its rounding error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Fp64Pair<T = f64> {
    pub hi: T,
    pub lo: T,
}

impl<T> Fp64Pair<T> {
    #[inline(always)]
    pub const fn new(hi: T, lo: T) -> Self {
        Self { hi, lo }
    }
}

/// Knuth's TwoSum: `hi = fl(a + b)` and `hi + lo = a + b` exactly, for any
/// ordering of `|a|` and `|b|`. 6 operations.
#[inline(always)]
pub fn two_sum<T: Scalar>(a: T, b: T) -> Fp64Pair<T> {
    let x = a + b;
    let z = x - a;
    let y = (a - (x - z)) + (b - z);
    Fp64Pair::new(x, y)
}

/// QuickTwoSum (Fast2Sum): same contract as [`two_sum`] in 3 operations, but
/// only valid when `|a| >= |b|`.
///
/// The precondition is the caller's obligation; debug builds assert it for
/// finite inputs (a zero operand on either side is always exact).
#[inline(always)]
pub fn quick_two_sum<T: Scalar>(a: T, b: T) -> Fp64Pair<T> {
    debug_assert!(
        !(a.is_finite() && b.is_finite()) || a.abs() >= b.abs() || a.is_zero() || b.is_zero(),
        "quick_two_sum requires |a| >= |b| (a = {a:?}, b = {b:?})"
    );
    fast_two_sum(a, b)
}

/// Unchecked Fast2Sum used inside the multi-word algorithms, where the
/// magnitude ordering holds only approximately (e.g. after cancellation).
#[inline(always)]
pub(crate) fn fast_two_sum<T: Scalar>(a: T, b: T) -> Fp64Pair<T> {
    let x = a + b;
    let y = (a - x) + b;
    Fp64Pair::new(x, y)
}

/// TwoProdFMA: `hi = fl(a * b)`, `lo = fma(a, b, -hi)`. 2 operations.
///
/// Exact unless `a * b` overflows or the error term falls below the
/// subnormal range.
#[inline(always)]
pub fn two_prod_fma<T: Scalar>(a: T, b: T) -> Fp64Pair<T> {
    let x = a * b;
    let y = a.mul_add(b, -x);
    Fp64Pair::new(x, y)
}

/// Checks that `f64::mul_add` rounds once. Fails if the platform emulates FMA
/// as a separate multiply and add.
pub fn fma_is_fused() -> bool {
    let t = 1.0 + 2f64.powi(-27);
    let p = t * t; // rounds 1 + 2^-26 + 2^-54 to 1 + 2^-26
    std::hint::black_box(t).mul_add(std::hint::black_box(t), -p) == 2f64.powi(-54)
}

/// Checks that the ambient FP64 rounding is round-to-nearest, ties-to-even.
pub fn rounds_to_nearest_even() -> bool {
    let one = std::hint::black_box(1.0f64);
    let u = std::hint::black_box(UNIT_ROUNDOFF);
    // 1 + u is a tie between 1 and 1 + 2u: even mantissa wins.
    let tie_down = one + u == 1.0;
    // 1 + 3u is a tie between 1 + 2u and 1 + 4u: 1 + 4u has the even mantissa.
    let tie_up = one + 3.0 * u == 1.0 + 4.0 * u;
    let below_half = one + 0.75 * u == 1.0;
    let above_half = one + 1.25 * u == 1.0 + 2.0 * u;
    let negative = -one - u == -1.0;
    tie_down && tie_up && below_half && above_half && negative
}

#[cfg(test)]
mod tests {
    use super::*;

    const P53: f64 = UNIT_ROUNDOFF;

    #[test]
    fn environment_is_rn_with_fused_fma() {
        assert!(rounds_to_nearest_even());
        assert!(fma_is_fused());
    }

    #[test]
    fn two_sum_examples() {
        assert_eq!(two_sum(1.0, 0.0), Fp64Pair::new(1.0, 0.0));
        for a in [1.0, -3.5, 1e300, 7e-310] {
            let r = two_sum(a, -a);
            assert_eq!((r.hi, r.lo), (0.0, 0.0));
        }
        assert_eq!(two_sum(1.0, P53), Fp64Pair::new(1.0, P53));
        // operand order does not matter
        assert_eq!(two_sum(P53, 1.0), Fp64Pair::new(1.0, P53));
    }

    #[test]
    fn quick_two_sum_examples() {
        assert_eq!(quick_two_sum(1.0, 0.0), Fp64Pair::new(1.0, 0.0));
        assert_eq!(quick_two_sum(2.0, 1.0), Fp64Pair::new(3.0, 0.0));
        assert_eq!(quick_two_sum(1.0, P53), Fp64Pair::new(1.0, P53));
    }

    #[test]
    #[cfg(debug_assertions)]
    #[should_panic(expected = "quick_two_sum requires")]
    fn quick_two_sum_checks_ordering_in_debug() {
        quick_two_sum(1.0, 2.0);
    }

    #[test]
    fn two_prod_examples() {
        for x in [0.0, -1.5, 3.0e-200, f64::MAX] {
            assert_eq!(two_prod_fma(1.0, x), Fp64Pair::new(x, 0.0));
        }
        assert_eq!(two_prod_fma(2.0, 3.0), Fp64Pair::new(6.0, 0.0));
        let t = 1.0 + 2f64.powi(-27);
        assert_eq!(two_prod_fma(t, t), Fp64Pair::new(1.0 + 2f64.powi(-26), 2f64.powi(-54)));
    }

    #[test]
    fn nan_and_inf_propagate() {
        assert!(two_sum(f64::NAN, 1.0).hi.is_nan());
        assert_eq!(two_sum(f64::INFINITY, 1.0).hi, f64::INFINITY);
        assert!(two_prod_fma(f64::INFINITY, 0.0).hi.is_nan());
    }
}
