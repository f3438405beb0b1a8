//! Triple-word (TW) and quasi triple-word (QTW) arithmetic.
//!
//! TW addition merges the six components by magnitude, accumulates them with
//! an error-free VecSum pass and renormalizes with VecSumErrBranch (VSEB)
//! truncated to three words. TW multiplication is the "fast" variant: the
//! three leading partial products are computed exactly, third-order terms are
//! accumulated with plain FMAs, and the result goes through the same
//! VecSum/VSEB renormalization. The VSEB branches and the merge comparisons
//! make these operations data-dependent, so they do not vectorize.
//!
//! The QTW operations are branch-free and leave the result un-normalized;
//! [`normalize_tw`] (VecSum3) reduces the overlap again.

use crate::eft::{fast_two_sum, two_prod_fma, two_sum, Scalar};

/// An unevaluated sum `w0 + w1 + w2` of three FP64 words, most significant
/// first.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TripleWord<T = f64> {
    pub w0: T,
    pub w1: T,
    pub w2: T,
}

impl<T: Scalar> TripleWord<T> {
    #[inline(always)]
    pub const fn new(w0: T, w1: T, w2: T) -> Self {
        Self { w0, w1, w2 }
    }

    #[inline(always)]
    pub fn from_f64(x: f64) -> Self {
        Self::new(T::from_f64(x), T::zero(), T::zero())
    }

    #[inline(always)]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// FP64 approximation, summing high to low.
    #[inline(always)]
    pub fn collapse(self) -> f64 {
        (self.w0.to_f64() + self.w1.to_f64()) + self.w2.to_f64()
    }

    /// `fl(w0 + w1) == w0` and `fl(w1 + w2) == w1`.
    pub fn is_normalized(self) -> bool {
        let (a, b, c) = (self.w0.to_f64(), self.w1.to_f64(), self.w2.to_f64());
        a + b == a && b + c == b
    }
}

/// Error-free accumulation from the least significant end:
/// `out[0]` is the rounded total and `sum(out) == sum(x)` exactly.
#[inline(always)]
fn vec_sum<T: Scalar, const N: usize>(mut x: [T; N]) -> [T; N] {
    for i in (0..N - 1).rev() {
        let p = two_sum(x[i], x[i + 1]);
        x[i] = p.hi;
        x[i + 1] = p.lo;
    }
    x
}

/// VecSumErrBranch truncated to three output words.
#[inline(always)]
fn vseb3<T: Scalar, const N: usize>(e: [T; N]) -> TripleWord<T> {
    let mut f = [T::zero(); 3];
    let mut j = 0;
    let mut eps = e[0];
    for &next in &e[1..] {
        let p = fast_two_sum(eps, next);
        f[j] = p.hi;
        if p.lo.is_zero() {
            eps = p.hi;
        } else {
            if j == 2 {
                return TripleWord::new(f[0], f[1], f[2]);
            }
            j += 1;
            eps = p.lo;
        }
    }
    f[j] = eps;
    TripleWord::new(f[0], f[1], f[2])
}

#[inline(always)]
fn renormalize<T: Scalar, const N: usize>(x: [T; N]) -> TripleWord<T> {
    vseb3(vec_sum(x))
}

/// Merges two magnitude-sorted lists into one, largest magnitude first.
/// Ties take the left operand first.
#[inline(always)]
fn merge<T: Scalar, const L: usize, const R: usize, const N: usize>(left: [T; L], right: [T; R]) -> [T; N] {
    debug_assert_eq!(L + R, N);
    let mut out = [T::zero(); N];
    let (mut i, mut j) = (0, 0);
    for slot in out.iter_mut() {
        let take_left = j == R || (i < L && left[i].abs() >= right[j].abs());
        if take_left {
            *slot = left[i];
            i += 1;
        } else {
            *slot = right[j];
            j += 1;
        }
    }
    out
}

/// Componentwise sign flip, which is exact.
impl<T: Scalar> std::ops::Neg for TripleWord<T> {
    type Output = Self;

    #[inline(always)]
    fn neg(self) -> Self {
        Self::new(-self.w0, -self.w1, -self.w2)
    }
}

#[inline(always)]
pub fn tw_add<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    renormalize(merge::<T, 3, 3, 6>([a.w0, a.w1, a.w2], [b.w0, b.w1, b.w2]))
}

#[inline(always)]
pub fn tw_sub<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    tw_add(a, -b)
}

/// Fast triple-word product.
#[inline(always)]
pub fn tw_mul<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    let p00 = two_prod_fma(a.w0, b.w0);
    let p01 = two_prod_fma(a.w0, b.w1);
    let p10 = two_prod_fma(a.w1, b.w0);
    let s = two_sum(p01.hi, p10.hi);
    let s2 = two_sum(s.hi, p00.lo);
    let third = a.w0.mul_add(b.w2, a.w1.mul_add(b.w1, a.w2.mul_add(b.w0, p01.lo + p10.lo))) + (s.lo + s2.lo);
    renormalize([p00.hi, s2.hi, third])
}

/// `a + b` for FP64 `a`; equals `tw_add((a, 0, 0), b)` componentwise.
#[inline(always)]
pub fn dxtw_add<T: Scalar>(a: T, b: TripleWord<T>) -> TripleWord<T> {
    renormalize(merge::<T, 1, 3, 4>([a], [b.w0, b.w1, b.w2]))
}

/// `a * b` for FP64 `a`; equals `tw_mul((a, 0, 0), b)` componentwise.
#[inline(always)]
pub fn dxtw_mul<T: Scalar>(a: T, b: TripleWord<T>) -> TripleWord<T> {
    let p00 = two_prod_fma(a, b.w0);
    let p01 = two_prod_fma(a, b.w1);
    let s2 = two_sum(p01.hi, p00.lo);
    let third = a.mul_add(b.w2, p01.lo) + s2.lo;
    renormalize([p00.hi, s2.hi, third])
}

/// Quasi triple-word addition, 21 operations.
#[inline(always)]
pub fn qtw_add<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    let s1 = two_sum(a.w0, b.w0);
    let s2 = two_sum(a.w1, b.w1);
    let s3 = two_sum(s2.hi, s1.lo);
    let c3 = ((a.w2 + b.w2) + s2.lo) + s3.lo;
    TripleWord::new(s1.hi, s3.hi, c3)
}

#[inline(always)]
pub fn qtw_sub<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    qtw_add(a, -b)
}

/// Quasi triple-word multiplication, 24 operations.
#[inline(always)]
pub fn qtw_mul<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    let p1 = two_prod_fma(a.w0, b.w0);
    let p2 = two_prod_fma(a.w0, b.w1);
    let p3 = two_prod_fma(a.w1, b.w0);
    let s4 = two_sum(p2.hi, p3.hi);
    let s5 = two_sum(s4.hi, p1.lo);
    let c3 = ((a.w2.mul_add(b.w0, p2.lo) + a.w1.mul_add(b.w1, p3.lo)) + a.w0.mul_add(b.w2, s4.lo)) + s5.lo;
    TripleWord::new(p1.hi, s5.hi, c3)
}

/// FP64 times QTW with the absent lower words of `a` elided.
#[inline(always)]
pub fn dxqtw_mul<T: Scalar>(a: T, b: TripleWord<T>) -> TripleWord<T> {
    let p1 = two_prod_fma(a, b.w0);
    let p2 = two_prod_fma(a, b.w1);
    let s5 = two_sum(p2.hi, p1.lo);
    let c3 = a.mul_add(b.w2, p2.lo) + s5.lo;
    TripleWord::new(p1.hi, s5.hi, c3)
}

/// FP64 plus QTW with the absent lower words of `a` elided.
#[inline(always)]
pub fn dxqtw_add<T: Scalar>(a: T, b: TripleWord<T>) -> TripleWord<T> {
    let s1 = two_sum(a, b.w0);
    let s3 = two_sum(b.w1, s1.lo);
    TripleWord::new(s1.hi, s3.hi, b.w2 + s3.lo)
}

/// VecSum3: two chained TwoSums from the top. Value-preserving; reduces but
/// does not eliminate overlap.
#[inline(always)]
pub fn normalize_tw<T: Scalar>(a: TripleWord<T>) -> TripleWord<T> {
    let s = two_sum(a.w0, a.w1);
    let t = two_sum(s.lo, a.w2);
    TripleWord::new(s.hi, t.hi, t.lo)
}

#[inline]
fn zero_divisor<T: Scalar>(a: TripleWord<T>, bc: f64) -> TripleWord<T> {
    TripleWord::new(T::from_f64(a.collapse() / bc), T::zero(), T::zero())
}

/// TW long division: four FP64 quotient digits from successive remainders,
/// renormalized to three words.
pub fn tw_div<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    let bc = b.collapse();
    if bc == 0.0 {
        return zero_divisor(a, bc);
    }
    let d = T::from_f64(bc);
    let q0 = T::from_f64(a.collapse()) / d;
    let r = tw_sub(a, dxtw_mul(q0, b));
    let q1 = T::from_f64(r.collapse()) / d;
    let r = tw_sub(r, dxtw_mul(q1, b));
    let q2 = T::from_f64(r.collapse()) / d;
    let r = tw_sub(r, dxtw_mul(q2, b));
    let q3 = T::from_f64(r.collapse()) / d;
    renormalize([q0, q1, q2, q3])
}

/// Long division built from the quasi operations; the result is quasi.
pub fn qtw_div<T: Scalar>(a: TripleWord<T>, b: TripleWord<T>) -> TripleWord<T> {
    let bc = b.collapse();
    if bc == 0.0 {
        return zero_divisor(a, bc);
    }
    let d = T::from_f64(bc);
    let q0 = T::from_f64(a.collapse()) / d;
    let r = qtw_sub(a, dxqtw_mul(q0, b));
    let q1 = T::from_f64(r.collapse()) / d;
    let r = qtw_sub(r, dxqtw_mul(q1, b));
    let q2 = T::from_f64(r.collapse()) / d;
    let r = qtw_sub(r, dxqtw_mul(q2, b));
    let q3 = T::from_f64(r.collapse()) / d;
    normalize_tw(dxqtw_add(q3, TripleWord::new(q0, q1, q2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Tw = TripleWord<f64>;

    fn p2(e: i32) -> f64 {
        2f64.powi(e)
    }

    fn third() -> Tw {
        // 1/3 to ~160 bits
        Tw::new(1.0 / 3.0, 1.850371707708594e-17, 1.0271626370065257e-33)
    }

    #[test]
    fn additive_identity() {
        let a = third();
        assert!(a.is_normalized());
        assert_eq!(tw_add(a, Tw::zero()), a);
        assert_eq!(qtw_add(a, Tw::zero()), a);
        assert_eq!(dxqtw_add(0.0, a), a);
    }

    #[test]
    fn cancellation_gives_zero() {
        let a = third();
        assert_eq!(tw_add(a, -a).collapse(), 0.0);
        assert_eq!(qtw_add(Tw::from_f64(1.0), Tw::from_f64(-1.0)).collapse(), 0.0);
    }

    #[test]
    fn small_sum_is_exact() {
        let r = tw_add(Tw::from_f64(1.0), Tw::from_f64(p2(-60)));
        assert_eq!(r, Tw::new(1.0, p2(-60), 0.0));
        assert!(r.is_normalized());
    }

    #[test]
    fn multiplicative_identity_and_integers() {
        let a = third();
        assert_eq!(tw_mul(Tw::from_f64(1.0), a), a);
        assert_eq!(qtw_mul(Tw::from_f64(1.0), a), a);
        assert_eq!(dxqtw_mul(1.0, a), a);
        assert_eq!(dxqtw_mul(0.0, a).collapse(), 0.0);
        assert_eq!(tw_mul(Tw::from_f64(2.0), Tw::from_f64(3.0)), Tw::from_f64(6.0));
        assert_eq!(qtw_mul(Tw::from_f64(2.0), Tw::from_f64(3.0)).collapse(), 6.0);
    }

    #[test]
    fn vecsum3_examples() {
        let a = third();
        assert_eq!(normalize_tw(a), a);
        let r = normalize_tw(Tw::new(1.0, 1.0, 1.0));
        assert_eq!(r.collapse(), 3.0);
        assert_eq!(r, Tw::new(2.0, 1.0, 0.0));
    }

    #[test]
    fn division_exact_cases() {
        assert_eq!(tw_div(Tw::from_f64(6.0), Tw::from_f64(3.0)), Tw::from_f64(2.0));
        assert_eq!(qtw_div(Tw::from_f64(6.0), Tw::from_f64(3.0)).collapse(), 2.0);
        let a = third();
        assert_eq!(tw_div(a, a), Tw::from_f64(1.0));
        assert_eq!(tw_div(Tw::from_f64(-2.0), Tw::zero()).w0, f64::NEG_INFINITY);
    }

    #[test]
    fn mixed_ops_match_promoted() {
        let b = third();
        for a in [0.0, 1.0, -7.25, 1.0 / 7.0, 3.0e10] {
            let pa = Tw::from_f64(a);
            assert_eq!(dxtw_add(a, b), tw_add(pa, b));
            assert_eq!(dxtw_mul(a, b), tw_mul(pa, b));
        }
    }
}
