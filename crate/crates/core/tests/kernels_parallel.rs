use multiword_cg::kernels::{
    axpy, dot, norm2_fp64, normalize_vector, scal_then_add, spmv, Arithmetic, MultiwordVector,
};
use multiword_cg::sparse::random_spd;
use multiword_cg::{with_arithmetic, Exec, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vector<A: Arithmetic>(n: usize, seed: u64) -> MultiwordVector<A> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) * 1e-17).collect();
    // a second FP64 term gives the multi-word elements nonzero low words
    let mut v = MultiwordVector::<A>::from_f64(&xs);
    for (e, y) in v.iter_mut().zip(ys) {
        *e = A::add(*e, A::from_f64(y));
    }
    v
}

#[test]
fn kernels_match_sequential_bitwise() {
    let n = 5000;
    let m = random_spd(n, 0.002, 9);
    for threads in [2, 3, 8] {
        let par = Exec::new(threads).unwrap();
        let seq = Exec::sequential().with_partitions(threads).unwrap();
        for mode in Mode::ALL {
            with_arithmetic!(mode, A => {
                let x = vector::<A>(n, 1);
                let y = vector::<A>(n, 2);
                let alpha = A::from_f64(0.37);

                let (mut ys, mut yp) = (MultiwordVector::<A>::zeros(n), MultiwordVector::<A>::zeros(n));
                spmv::<A>(&seq, &m, &x, &mut ys).unwrap();
                spmv::<A>(&par, &m, &x, &mut yp).unwrap();
                assert_eq!(ys, yp, "spmv {mode} {threads}");

                assert_eq!(dot::<A>(&seq, &x, &y).unwrap(), dot::<A>(&par, &x, &y).unwrap(), "dot {mode}");
                assert_eq!(norm2_fp64::<A>(&seq, &x).to_bits(), norm2_fp64::<A>(&par, &x).to_bits());

                let (mut a1, mut a2) = (y.clone(), y.clone());
                axpy::<A>(&seq, alpha, &x, &mut a1).unwrap();
                axpy::<A>(&par, alpha, &x, &mut a2).unwrap();
                assert_eq!(a1, a2, "axpy {mode}");

                scal_then_add::<A>(&seq, alpha, &mut a1, &x).unwrap();
                scal_then_add::<A>(&par, alpha, &mut a2, &x).unwrap();
                assert_eq!(a1, a2, "scal_then_add {mode}");

                normalize_vector::<A>(&seq, &mut a1);
                normalize_vector::<A>(&par, &mut a2);
                assert_eq!(a1, a2, "normalize {mode}");
            });
        }
    }
}

#[test]
fn repeated_parallel_dot_is_reproducible() {
    let exec = Exec::new(4).unwrap();
    with_arithmetic!(Mode::Qtw, A => {
        let x = vector::<A>(20_000, 3);
        let y = vector::<A>(20_000, 4);
        let first = dot::<A>(&exec, &x, &y).unwrap();
        for _ in 0..10 {
            assert_eq!(dot::<A>(&exec, &x, &y).unwrap(), first);
        }
    });
}
