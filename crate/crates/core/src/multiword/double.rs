//! Double-word (DW) and quasi double-word (QDW) arithmetic.
//!
//! DW results are normalized: `fl(w0 + w1) == w0`. QDW results skip the final
//! QuickTwoSum, so only the value `w0 + w1` is meaningful.

use crate::eft::{fast_two_sum, two_prod_fma, two_sum, Scalar};

/// An unevaluated sum `w0 + w1` of two FP64 words.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleWord<T = f64> {
    pub w0: T,
    pub w1: T,
}

impl<T: Scalar> DoubleWord<T> {
    #[inline(always)]
    pub const fn new(w0: T, w1: T) -> Self {
        Self { w0, w1 }
    }

    #[inline(always)]
    pub fn from_f64(x: f64) -> Self {
        Self::new(T::from_f64(x), T::zero())
    }

    #[inline(always)]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// FP64 approximation, summing high to low.
    #[inline(always)]
    pub fn collapse(self) -> f64 {
        self.w0.to_f64() + self.w1.to_f64()
    }

    /// `fl(w0 + w1) == w0`.
    pub fn is_normalized(self) -> bool {
        self.collapse() == self.w0.to_f64()
    }
}

/// Componentwise sign flip, which is exact.
impl<T: Scalar> std::ops::Neg for DoubleWord<T> {
    type Output = Self;

    #[inline(always)]
    fn neg(self) -> Self {
        Self::new(-self.w0, -self.w1)
    }
}

#[inline(always)]
pub fn dw_add<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    let DoubleWord { w0: s, w1: e } = qdw_add(a, b);
    let c = fast_two_sum(s, e);
    DoubleWord::new(c.hi, c.lo)
}

#[inline(always)]
pub fn dw_sub<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    dw_add(a, -b)
}

#[inline(always)]
pub fn dw_mul<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    let DoubleWord { w0: p, w1: e } = qdw_mul(a, b);
    let c = fast_two_sum(p, e);
    DoubleWord::new(c.hi, c.lo)
}

/// DW addition without the trailing normalization. 8 operations.
///
/// The low words are added first so the result is bitwise commutative.
#[inline(always)]
pub fn qdw_add<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    let s = two_sum(a.w0, b.w0);
    let e = s.lo + (a.w1 + b.w1);
    DoubleWord::new(s.hi, e)
}

#[inline(always)]
pub fn qdw_sub<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    qdw_add(a, -b)
}

/// DW multiplication without the trailing normalization. 4 operations.
#[inline(always)]
pub fn qdw_mul<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    let p = two_prod_fma(a.w0, b.w0);
    let e = a.w0.mul_add(b.w1, p.lo);
    let e = a.w1.mul_add(b.w0, e);
    DoubleWord::new(p.hi, e)
}

/// Error-free renormalization by QuickTwoSum. Exact when `|w1| <= |w0|`,
/// which quasi results satisfy.
#[inline(always)]
pub fn normalize_dw<T: Scalar>(a: DoubleWord<T>) -> DoubleWord<T> {
    let c = fast_two_sum(a.w0, a.w1);
    DoubleWord::new(c.hi, c.lo)
}

/// `a + b` for FP64 `a`; equals `dw_add((a, 0), b)` componentwise.
#[inline(always)]
pub fn dxdw_add<T: Scalar>(a: T, b: DoubleWord<T>) -> DoubleWord<T> {
    let DoubleWord { w0: s, w1: e } = dxqdw_add(a, b);
    let c = fast_two_sum(s, e);
    DoubleWord::new(c.hi, c.lo)
}

/// `a * b` for FP64 `a`; equals `dw_mul((a, 0), b)` componentwise.
#[inline(always)]
pub fn dxdw_mul<T: Scalar>(a: T, b: DoubleWord<T>) -> DoubleWord<T> {
    let DoubleWord { w0: p, w1: e } = dxqdw_mul(a, b);
    let c = fast_two_sum(p, e);
    DoubleWord::new(c.hi, c.lo)
}

#[inline(always)]
pub fn dxqdw_add<T: Scalar>(a: T, b: DoubleWord<T>) -> DoubleWord<T> {
    let s = two_sum(a, b.w0);
    DoubleWord::new(s.hi, s.lo + b.w1)
}

#[inline(always)]
pub fn dxqdw_mul<T: Scalar>(a: T, b: DoubleWord<T>) -> DoubleWord<T> {
    let p = two_prod_fma(a, b.w0);
    DoubleWord::new(p.hi, a.mul_add(b.w1, p.lo))
}

#[inline]
fn zero_divisor<T: Scalar>(a: DoubleWord<T>, bc: f64) -> DoubleWord<T> {
    DoubleWord::new(T::from_f64(a.collapse() / bc), T::zero())
}

/// DW division by long division: three FP64 quotient digits, each taken from
/// the current remainder, then renormalized.
pub fn dw_div<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    let bc = b.collapse();
    if bc == 0.0 {
        return zero_divisor(a, bc);
    }
    let d = T::from_f64(bc);
    let q0 = T::from_f64(a.collapse()) / d;
    let r = dw_sub(a, dxdw_mul(q0, b));
    let q1 = T::from_f64(r.collapse()) / d;
    let r = dw_sub(r, dxdw_mul(q1, b));
    let q2 = T::from_f64(r.collapse()) / d;
    let q = fast_two_sum(q0, q1);
    dxdw_add(q2, DoubleWord::new(q.hi, q.lo))
}

/// Long division built from the quasi operations; the result is quasi.
pub fn qdw_div<T: Scalar>(a: DoubleWord<T>, b: DoubleWord<T>) -> DoubleWord<T> {
    let bc = b.collapse();
    if bc == 0.0 {
        return zero_divisor(a, bc);
    }
    let d = T::from_f64(bc);
    let q0 = T::from_f64(a.collapse()) / d;
    let r = qdw_sub(a, dxqdw_mul(q0, b));
    let q1 = T::from_f64(r.collapse()) / d;
    let r = qdw_sub(r, dxqdw_mul(q1, b));
    let q2 = T::from_f64(r.collapse()) / d;
    dxqdw_add(q2, DoubleWord::new(q0, q1))
}
