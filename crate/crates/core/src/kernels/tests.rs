use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::multiword::{DoubleWord, TripleWord};
use crate::oracle::{relative_error, ExactValue, ToExact};
use crate::sparse::{laplacian_2d, random_spd, CsrMatrix};
use crate::with_arithmetic;

fn p2(e: i32) -> f64 {
    2f64.powi(e)
}

fn random_dw(rng: &mut ChaCha8Rng) -> DoubleWord {
    let hi: f64 = rng.gen_range(-1.0..1.0);
    DoubleWord::new(hi, hi * rng.gen_range(-1.0..1.0) * p2(-54))
}

fn random_tw(rng: &mut ChaCha8Rng) -> TripleWord {
    let hi: f64 = rng.gen_range(-1.0..1.0);
    let mid = hi * rng.gen_range(-1.0..1.0) * p2(-54);
    TripleWord::new(hi, mid, mid * rng.gen_range(-1.0..1.0) * p2(-54))
}

fn small_matrix() -> CsrMatrix {
    CsrMatrix::from_triplets(
        3,
        3,
        [(0, 0, 4.1), (0, 1, -1.3), (1, 0, -1.3), (1, 1, 3.7), (1, 2, 0.3), (2, 1, 0.3), (2, 2, 2.9)],
    )
    .unwrap()
}

fn exact_row(m: &CsrMatrix, i: usize, x: &[ExactValue]) -> ExactValue {
    let (cols, vals) = m.row(i);
    cols.iter().zip(vals).fold(ExactValue::zero(), |acc, (&j, v)| &acc + &(&v.exact() * &x[j]))
}

#[test]
fn spmv_identity_and_zero() {
    let exec = Exec::sequential();
    for mode in Mode::ALL {
        with_arithmetic!(mode, A => {
            let x = MultiwordVector::<A>::from_f64(&[1.5, -2.0, 0.1, 7.0]);
            let mut y = MultiwordVector::<A>::zeros(4);
            spmv::<A>(&exec, &CsrMatrix::identity(4), &x, &mut y).unwrap();
            assert_eq!(y, x, "{mode}");
            let zero = MultiwordVector::<A>::zeros(4);
            spmv::<A>(&exec, &laplacian_2d(2), &zero, &mut y).unwrap();
            assert_eq!(y, zero, "{mode}");
        });
    }
}

#[test]
fn spmv_matches_oracle_rows() {
    let exec = Exec::sequential();
    let m = small_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xd: Vec<DoubleWord> = (0..3).map(|_| random_dw(&mut rng)).collect();
    let xe: Vec<ExactValue> = xd.iter().map(|x| x.exact()).collect();
    let mut y = vec![DoubleWord::zero(); 3];
    spmv::<Dw>(&exec, &m, &xd, &mut y).unwrap();
    for (i, yi) in y.iter().enumerate() {
        assert!(relative_error(&yi.exact(), &exact_row(&m, i, &xe)) <= p2(-100));
    }
    let xt: Vec<TripleWord> = (0..3).map(|_| random_tw(&mut rng)).collect();
    let xe: Vec<ExactValue> = xt.iter().map(|x| x.exact()).collect();
    let mut y = vec![TripleWord::zero(); 3];
    spmv::<Tw>(&exec, &m, &xt, &mut y).unwrap();
    for (i, yi) in y.iter().enumerate() {
        assert!(relative_error(&yi.exact(), &exact_row(&m, i, &xe)) <= p2(-150));
    }
}

#[test]
fn spmv_rejects_mismatch() {
    let mut y = vec![0.0; 3];
    let err = spmv::<Fp64>(&Exec::sequential(), &small_matrix(), &[1.0, 2.0], &mut y).unwrap_err();
    assert_eq!((err.expected, err.found), (3, 2));
}

#[test]
fn dot_basis_and_zero() {
    let exec = Exec::sequential();
    let y = MultiwordVector::<Qtw>::from_elems(vec![
        TripleWord::new(1.0, p2(-60), p2(-120)),
        TripleWord::new(-3.0, p2(-58), 0.0),
    ]);
    let e1 = MultiwordVector::<Qtw>::from_f64(&[0.0, 1.0]);
    assert_eq!(dot::<Qtw>(&exec, &e1, &y).unwrap().exact(), y[1].exact());
    let z = MultiwordVector::<Qtw>::zeros(2);
    assert!(dot::<Qtw>(&exec, &z, &y).unwrap().exact().is_zero());
}

#[test]
fn dot_with_cancellation_matches_oracle_scale() {
    let exec = Exec::sequential();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 200;
    let half: Vec<DoubleWord> = (0..n / 2).map(|_| random_dw(&mut rng)).collect();
    let x: Vec<DoubleWord> = half.iter().chain(&half).copied().collect();
    let mut y: Vec<DoubleWord> = (0..n).map(|_| random_dw(&mut rng)).collect();
    // second half cancels the first half up to the low words
    for i in 0..n / 2 {
        y[n / 2 + i] = DoubleWord::new(-y[i].w0, y[n / 2 + i].w1);
    }
    let got = dot::<Dw>(&exec, &x, &y).unwrap().exact();
    let terms: Vec<ExactValue> = x.iter().zip(&y).map(|(a, b)| &a.exact() * &b.exact()).collect();
    let exact = terms.iter().fold(ExactValue::zero(), |acc, t| &acc + t);
    let scale = terms.iter().fold(ExactValue::zero(), |acc, t| &acc + &t.abs());
    let err = (&got - &exact).abs();
    assert!(err <= scale.mul_pow2(-100), "{} vs {}", err.to_f64(), scale.to_f64());
    assert!(exact.abs() < scale.mul_pow2(-40), "vectors should cancel heavily");
}

#[test]
fn axpy_and_scal_then_add_cases() {
    let exec = Exec::sequential();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<DoubleWord> = (0..5).map(|_| random_dw(&mut rng)).collect();
    let y0: Vec<DoubleWord> = (0..5).map(|_| random_dw(&mut rng)).collect();

    let mut y = y0.clone();
    axpy::<Dw>(&exec, DoubleWord::zero(), &x, &mut y).unwrap();
    assert_eq!(y, y0);

    let neg: Vec<DoubleWord> = y0.iter().map(|v| -*v).collect();
    let mut y = y0.clone();
    axpy::<Dw>(&exec, DoubleWord::from_f64(1.0), &neg, &mut y).unwrap();
    assert!(y.iter().all(|v| v.exact().is_zero()));

    let alpha = random_dw(&mut rng);
    let mut y = y0.clone();
    axpy::<Dw>(&exec, alpha, &x, &mut y).unwrap();
    for i in 0..5 {
        let exact = &y0[i].exact() + &(&alpha.exact() * &x[i].exact());
        assert!(relative_error(&y[i].exact(), &exact) <= p2(-100));
    }

    let mut p = x.clone();
    scal_then_add::<Dw>(&exec, DoubleWord::zero(), &mut p, &y0).unwrap();
    assert_eq!(p, y0);

    let beta = random_dw(&mut rng);
    let mut p = x.clone();
    scal_then_add::<Dw>(&exec, beta, &mut p, &[DoubleWord::zero(); 5]).unwrap();
    for i in 0..5 {
        assert_eq!(p[i], crate::multiword::dw_mul(beta, x[i]));
    }

    let mut p = x.clone();
    scal_then_add::<Dw>(&exec, beta, &mut p, &y0).unwrap();
    for i in 0..5 {
        let exact = &y0[i].exact() + &(&beta.exact() * &x[i].exact());
        assert!(relative_error(&p[i].exact(), &exact) <= p2(-100));
    }
}

#[test]
fn norm2_examples() {
    let exec = Exec::sequential();
    assert_eq!(norm2_fp64::<Fp64>(&exec, &[0.0, 1.0, 0.0]), 1.0);
    assert_eq!(norm2_fp64::<Dw>(&exec, &[DoubleWord::zero(); 4]), 0.0);
    assert_eq!(norm2_fp64::<Tw>(&exec, &[TripleWord::from_f64(3.0), TripleWord::from_f64(4.0)]), 5.0);
    assert_eq!(norm2_fp64::<Fp64>(&exec, &[1e300, 1e300]), f64::INFINITY);
}

#[test]
fn tw_metrics_trivial_cases() {
    let exec = Exec::sequential();
    let m = laplacian_2d(3);
    let ones = vec![1.0; 9];
    let mut b = vec![0.0; 9];
    spmv::<Fp64>(&exec, &m, &ones, &mut b).unwrap();
    let x = MultiwordVector::<Qdw>::from_f64(&ones);
    assert_eq!(norm_metrics_tw::<Qdw>(&exec, &m, &x, Some(&ones), &b).unwrap(), (Some(0.0), 0.0));
    let zero = MultiwordVector::<Qdw>::zeros(9);
    assert_eq!(norm_metrics_tw::<Qdw>(&exec, &m, &zero, Some(&ones), &b).unwrap(), (Some(1.0), 1.0));
    assert_eq!(norm_metrics_tw::<Qdw>(&exec, &m, &zero, None, &b).unwrap().0, None);
}

#[test]
fn tw_metrics_match_oracle() {
    let exec = Exec::sequential();
    let m = small_matrix();
    let b = [1.0, 0.5, -2.0];
    let xs = [1.0, 1.0, 1.0];
    let x = vec![DoubleWord::new(0.75, p2(-60)), DoubleWord::new(-0.125, -p2(-70)), DoubleWord::new(0.1, 0.0)];
    let (err, res) = norm_metrics_tw::<Dw>(&exec, &m, &x, Some(&xs), &b).unwrap();
    let xe: Vec<ExactValue> = x.iter().map(|v| v.exact()).collect();
    let sq = |v: &ExactValue| v * v;
    let e_num = (0..3).fold(ExactValue::zero(), |acc, i| &acc + &sq(&(&xe[i] - &1.0.exact())));
    let r_num = (0..3).fold(ExactValue::zero(), |acc, i| &acc + &sq(&(&b[i].exact() - &exact_row(&m, i, &xe))));
    let b_den = b.iter().fold(ExactValue::zero(), |acc, v| &acc + &sq(&v.exact()));
    // squared ratios in FP64 are accurate to a few ulps
    let close = |got: f64, num: &ExactValue, den: f64| {
        let want = (num.to_f64() / den).sqrt();
        ((got - want) / want).abs() < 1e-15
    };
    assert!(close(err.unwrap(), &e_num, 3.0));
    assert!(close(res, &r_num, b_den.to_f64()));
}

#[test]
fn normalize_vector_preserves_values() {
    let exec = Exec::sequential();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v: Vec<DoubleWord> =
        (0..50).map(|_| DoubleWord::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let mut w = v.clone();
    normalize_vector::<Qdw>(&exec, &mut w);
    for (a, b) in v.iter().zip(&w) {
        assert_eq!(a.exact(), b.exact());
        assert!(b.is_normalized());
    }
    let again = {
        let mut u = w.clone();
        normalize_vector::<Qdw>(&exec, &mut u);
        u
    };
    assert_eq!(again, w);
    let t: Vec<TripleWord> = (0..50)
        .map(|_| TripleWord::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut u = t.clone();
    normalize_vector::<Qtw>(&exec, &mut u);
    for (a, b) in t.iter().zip(&u) {
        assert_eq!(a.exact(), b.exact());
    }
    let mut same = t.clone();
    normalize_vector::<Tw>(&exec, &mut same);
    assert_eq!(same, t);
}

#[test]
fn parallel_results_are_bitwise_sequential() {
    let m = random_spd(5000, 0.002, 9);
    let n = m.n_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let par = Exec::new(4).unwrap();
    let seq = Exec::sequential().with_partitions(4).unwrap();
    for mode in Mode::ALL {
        with_arithmetic!(mode, A => {
            let x = MultiwordVector::<A>::from_f64(&xs);
            let mut y1 = MultiwordVector::<A>::zeros(n);
            let mut y2 = MultiwordVector::<A>::zeros(n);
            spmv::<A>(&par, &m, &x, &mut y1).unwrap();
            spmv::<A>(&Exec::sequential(), &m, &x, &mut y2).unwrap();
            assert_eq!(y1, y2, "spmv {mode}");
            assert_eq!(dot::<A>(&par, &x, &y1).unwrap(), dot::<A>(&seq, &x, &y1).unwrap(), "dot {mode}");
            assert_eq!(norm2_fp64::<A>(&par, &y1), norm2_fp64::<A>(&seq, &y1));
        });
    }
}

#[test]
fn single_partition_dot_is_the_sequential_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x: Vec<TripleWord> = (0..300).map(|_| random_tw(&mut rng)).collect();
    let mut acc = TripleWord::zero();
    for v in &x {
        acc = crate::multiword::qtw_add(acc, crate::multiword::qtw_mul(*v, *v));
    }
    assert_eq!(dot::<Qtw>(&Exec::sequential(), &x, &x).unwrap(), acc);
}
