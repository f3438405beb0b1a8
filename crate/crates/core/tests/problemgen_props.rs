use multiword_cg::eft::UNIT_ROUNDOFF;
use multiword_cg::oracle::{ExactValue, ToExact};
use multiword_cg::problemgen::generate;
use multiword_cg::sparse::{expand_symmetric, CsrMatrix};
use proptest::prelude::*;

fn symmetric() -> impl Strategy<Value = CsrMatrix> {
    (1usize..30).prop_flat_map(|n| {
        let entry = (0..n, 0..n, -1.0f64..1.0, -30i32..30);
        prop::collection::vec(entry, 1..5 * n).prop_map(move |ts| {
            let ts = ts.into_iter().map(|(i, j, v, e)| (i.max(j), i.min(j), v * 2f64.powi(e)));
            expand_symmetric(&CsrMatrix::from_triplets(n, n, ts.collect::<Vec<_>>()).unwrap()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_system_is_exact(a in symmetric()) {
        let p = generate(&a).unwrap();
        prop_assert!(p.matrix.is_symmetric());
        prop_assert_eq!(p.matrix.row_ptr(), a.row_ptr());
        prop_assert_eq!(p.matrix.col_idx(), a.col_idx());
        for i in 0..a.n_rows() {
            let row = p.matrix.row(i).1.iter().fold(ExactValue::zero(), |s, v| &s + &v.exact());
            prop_assert_eq!(row, p.rhs[i].exact());
        }
        let max_row = (0..a.n_rows()).map(|i| a.row(i).0.len()).max().unwrap() as f64;
        prop_assert!(p.perturbation_norm <= 2.0 * max_row * UNIT_ROUNDOFF);
    }
}
