use multiword_cg::multiword::*;
use multiword_cg::oracle::{relative_error, ExactValue, ToExact};
use multiword_cg::verify::sample::{self, normalized_dw, normalized_tw, quasi_dw, quasi_tw};
use multiword_cg::verify::{DIV_FACTOR, DW_FLOOR, TW_FLOOR};
use proptest::prelude::*;

fn dw() -> impl Strategy<Value = DoubleWord> {
    any::<u64>().prop_map(|s| normalized_dw(&mut sample::rng(s)))
}

fn tw() -> impl Strategy<Value = TripleWord> {
    any::<u64>().prop_map(|s| normalized_tw(&mut sample::rng(s)))
}

fn same_sign_pair_dw() -> impl Strategy<Value = (DoubleWord, DoubleWord)> {
    (dw(), dw()).prop_map(|(a, b)| (a, sample::same_sign_dw(a, b)))
}

fn same_sign_pair_tw() -> impl Strategy<Value = (TripleWord, TripleWord)> {
    (tw(), tw()).prop_map(|(a, b)| (a, sample::same_sign_tw(a, b)))
}

/// `|w1|` in units of the last place of `w0`; at most 1/2 when normalized.
fn overlap(x: DoubleWord) -> f64 {
    if x.w0 == 0.0 {
        return 0.0;
    }
    let e = x.w0.abs().log2().floor() as i32;
    x.w1.abs() / 2f64.powi(e - 52)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5_000))]

    #[test]
    fn dw_add_and_mul_meet_floor((a, b) in same_sign_pair_dw()) {
        let (ea, eb) = (a.exact(), b.exact());
        prop_assert!(relative_error(&dw_add(a, b).exact(), &(&ea + &eb)) <= DW_FLOOR);
        prop_assert!(relative_error(&dw_mul(a, b).exact(), &(&ea * &eb)) <= DW_FLOOR);
        prop_assert!(dw_add(a, b).is_normalized());
    }

    #[test]
    fn tw_add_and_mul_meet_floor((a, b) in same_sign_pair_tw()) {
        let (ea, eb) = (a.exact(), b.exact());
        prop_assert!(relative_error(&tw_add(a, b).exact(), &(&ea + &eb)) <= TW_FLOOR);
        prop_assert!(relative_error(&tw_mul(a, b).exact(), &(&ea * &eb)) <= TW_FLOOR);
    }

    #[test]
    fn division_is_within_four_mul_floors(a in dw(), b in dw(), t in tw(), u in tw()) {
        let q = dw_div(a, b);
        prop_assert!(relative_error(&(&q.exact() * &b.exact()), &a.exact()) <= DIV_FACTOR * DW_FLOOR);
        let q = qdw_div(a, b);
        prop_assert!(relative_error(&(&q.exact() * &b.exact()), &a.exact()) <= DIV_FACTOR * DW_FLOOR);
        let q = tw_div(t, u);
        prop_assert!(relative_error(&(&q.exact() * &u.exact()), &t.exact()) <= DIV_FACTOR * TW_FLOOR);
        let q = qtw_div(t, u);
        prop_assert!(relative_error(&(&q.exact() * &u.exact()), &t.exact()) <= DIV_FACTOR * TW_FLOOR);
    }

    #[test]
    fn addition_commutes_bitwise(a in dw(), b in dw(), t in tw(), u in tw()) {
        prop_assert_eq!(dw_add(a, b), dw_add(b, a));
        prop_assert_eq!(qdw_add(a, b), qdw_add(b, a));
        prop_assert_eq!(qtw_add(t, u), qtw_add(u, t));
    }

    #[test]
    fn normalization_preserves_value(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let d = quasi_dw(&mut rng);
        let nd = normalize_dw(d);
        prop_assert_eq!(nd.exact(), d.exact());
        prop_assert!(nd.is_normalized());
        let t = quasi_tw(&mut rng);
        prop_assert_eq!(normalize_tw(t).exact(), t.exact());
    }

    #[test]
    fn text_round_trips(a in dw(), t in tw()) {
        prop_assert_eq!(a.to_string().parse::<DoubleWord>().unwrap(), a);
        prop_assert_eq!(t.to_string().parse::<TripleWord>().unwrap(), t);
    }

    #[test]
    fn subtraction_of_self_is_zero(a in dw(), t in tw()) {
        prop_assert_eq!(dw_sub(a, a).collapse(), 0.0);
        prop_assert_eq!(tw_sub(t, t).collapse(), 0.0);
    }
}

#[test]
fn quasi_drift_and_recovery() {
    const K: usize = 100;
    let mut rng = sample::rng(5);
    let mut running_worst = vec![0.0f64; K];
    let (mut err_dw, mut err_renorm) = (0.0f64, 0.0f64);
    for _ in 0..300 {
        let (mut d, mut q, mut qn) = (DoubleWord::zero(), DoubleWord::zero(), DoubleWord::zero());
        let mut exact = ExactValue::zero();
        for slot in running_worst.iter_mut() {
            let x = normalized_dw(&mut rng);
            let x = if x.w0 < 0.0 { -x } else { x };
            d = dw_add(d, x);
            q = qdw_add(q, x);
            qn = normalize_dw(qdw_add(qn, x));
            assert!(qn.is_normalized());
            exact = &exact + &x.exact();
            *slot = slot.max(overlap(q));
        }
        err_dw = err_dw.max(relative_error(&d.exact(), &exact));
        err_renorm = err_renorm.max(relative_error(&qn.exact(), &exact));
    }
    for k in 1..K {
        running_worst[k] = running_worst[k].max(running_worst[k - 1]);
    }
    assert!(running_worst.windows(2).all(|w| w[0] <= w[1]));
    assert!(running_worst[0] <= 0.5, "one add from zero stays normalized");
    assert!(running_worst[K - 1] > 2.0, "overlap grows to {}", running_worst[K - 1]);
    assert!(running_worst[K - 1] > running_worst[K / 10]);
    assert!(err_renorm <= 2.0 * err_dw, "renormalized 2^{:.1} vs dw 2^{:.1}", err_renorm.log2(), err_dw.log2());
}
