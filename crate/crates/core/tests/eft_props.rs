use multiword_cg::eft::{quick_two_sum, two_prod_fma, two_sum};
use multiword_cg::oracle::ToExact;
use proptest::prelude::*;

/// Finite FP64 with a random significand and binary exponent in `exp`.
fn scaled(exp: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = f64> {
    (any::<u64>(), exp, any::<bool>()).prop_map(|(bits, e, neg)| {
        let m = f64::from_bits(0x3ff0_0000_0000_0000 | (bits >> 12));
        let x = m * 2f64.powi(e);
        if neg {
            -x
        } else {
            x
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20_000))]

    #[test]
    fn two_sum_is_error_free(a in scaled(-500..=500), b in scaled(-500..=500)) {
        let s = two_sum(a, b);
        prop_assert_eq!(&s.hi.exact() + &s.lo.exact(), &a.exact() + &b.exact());
        prop_assert_eq!(s.hi, a + b);
    }

    #[test]
    fn two_prod_fma_is_error_free(a in scaled(-450..=450), b in scaled(-450..=450)) {
        let p = two_prod_fma(a, b);
        prop_assert_eq!(&p.hi.exact() + &p.lo.exact(), &a.exact() * &b.exact());
        prop_assert_eq!(p.hi, a * b);
    }

    #[test]
    fn quick_two_sum_agrees_when_ordered(a in scaled(-500..=500), b in scaled(-500..=500)) {
        let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
        prop_assert_eq!(quick_two_sum(big, small), two_sum(a, b));
    }

    #[test]
    fn two_sum_handles_wide_exponent_gaps(a in scaled(-1000..=1000), b in scaled(-1000..=1000)) {
        let s = two_sum(a, b);
        prop_assert_eq!(&s.hi.exact() + &s.lo.exact(), &a.exact() + &b.exact());
    }
}
