//! Test systems with an exactly known solution.
//!
//! Given a symmetric `A`, [`generate`] returns a slightly perturbed symmetric
//! `A'` and an FP64 `b` with `A' * ones = b` holding exactly in real
//! arithmetic, so `x* = ones` is the true solution.
//!
//! Each row `i` gets a power-of-two grid `q_i` chosen so that `2^53 q_i`
//! bounds the row's absolute sum. Every entry `a_ij` is rounded to the
//! coarser of the two grids `max(q_i, q_j)`, which keeps the matrix
//! symmetric and makes every entry of row `i` a multiple of `q_i`. All
//! partial row sums are then multiples of `q_i` below `2^53 q_i`, i.e.
//! exactly representable, and the plain FP64 row sum is exact.
//!
//! Matrices whose entries already lie on their row grids (integer matrices
//! such as the identity or the Laplacian) come back unchanged. Otherwise each
//! entry moves by at most half a grid step, i.e. by at most `2 u ||A||_inf`.
//! A row much smaller than its neighbours inherits their coarser grid, so its
//! own relative change can be larger than that.

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::sparse::mtx::{write_array_file, write_matrix_market_file};
use crate::sparse::{CsrMatrix, Symmetry};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("non-finite entry in row {row}")]
    NonFinite { row: usize },
    #[error("row {row} cannot be made exact (absolute row sum overflows)")]
    Overflow { row: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedProblem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub x_star: Vec<f64>,
    /// `||A' - A||_inf / ||A||_inf`, at most `2 u` times the largest row
    /// length.
    pub perturbation_norm: f64,
}

impl GeneratedProblem {
    /// Writes the matrix (symmetric Matrix Market, lower triangle) and the
    /// right-hand side (array format).
    pub fn write_files(&self, matrix: &Path, rhs: &Path) -> io::Result<()> {
        write_matrix_market_file(matrix, &self.matrix, Symmetry::Symmetric)?;
        write_array_file(rhs, &self.rhs)
    }
}

/// `2^k` for any `k` in the FP64 range, including subnormal powers.
fn pow2(k: i64) -> f64 {
    if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (k + 1074))
    }
}

/// `floor(log2 x)` for finite positive `x`.
fn ilog2(x: f64) -> i64 {
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        -1074 + (63 - (bits & ((1 << 52) - 1)).leading_zeros() as i64)
    } else {
        biased - 1023
    }
}

/// Grid exponent for a row with absolute sum bounded by `bound`: the
/// smallest `E` with `2^E > bound`, minus 52. `None` for an all-zero row.
fn grid_exponent(bound: f64, bump: i64) -> Option<i64> {
    (bound > 0.0).then(|| (ilog2(bound) + 1 + bump - 52).max(-1074))
}

/// Builds an exactly solvable system with `x* = ones` from a symmetric
/// matrix in general (both triangles) form.
pub fn generate(a: &CsrMatrix) -> Result<GeneratedProblem, GenerateError> {
    if !a.is_square() {
        return Err(GenerateError::NotSquare(a.n_rows(), a.n_cols()));
    }
    let n = a.n_rows();
    let mut abs_sum = vec![0.0f64; n];
    for (i, sum) in abs_sum.iter_mut().enumerate() {
        let vals = a.row(i).1;
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(GenerateError::NonFinite { row: i });
        }
        *sum = vals.iter().map(|v| v.abs()).sum();
        if !sum.is_finite() {
            return Err(GenerateError::Overflow { row: i });
        }
    }
    if !a.is_symmetric() {
        return Err(GenerateError::NotSymmetric);
    }
    // FP64 summation error is below nnz * u relative, far under the margin.
    let bound: Vec<f64> = abs_sum.iter().map(|s| s * (1.0 + pow2(-30))).collect();
    let mut bump = vec![0i64; n];

    loop {
        let grid: Vec<Option<i64>> = (0..n).map(|i| grid_exponent(bound[i], bump[i])).collect();
        let mut values = Vec::with_capacity(a.nnz());
        for (i, j, v) in a.triplets() {
            let e = match (grid[i], grid[j]) {
                (Some(x), Some(y)) => x.max(y),
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => {
                    values.push(v);
                    continue;
                }
            };
            let q = pow2(e);
            values.push((v / q).round_ties_even() * q);
        }
        let matrix = a.with_values(values);

        let mut retry = false;
        for i in 0..n {
            let new_abs: f64 = matrix.row(i).1.iter().map(|v| v.abs()).sum();
            if !new_abs.is_finite() {
                return Err(GenerateError::Overflow { row: i });
            }
            // every partial sum must stay below 2^53 q_i
            if let Some(e) = grid[i] {
                if new_abs * (1.0 + pow2(-30)) >= pow2(e + 53) {
                    if e + 53 > 1023 {
                        return Err(GenerateError::Overflow { row: i });
                    }
                    bump[i] += 1;
                    retry = true;
                }
            }
        }
        if retry {
            continue;
        }

        let rhs: Vec<f64> = (0..n).map(|i| matrix.row(i).1.iter().sum()).collect();
        let norm_a = abs_sum.iter().copied().fold(0.0, f64::max);
        let norm_delta = (0..n)
            .map(|i| a.row(i).1.iter().zip(matrix.row(i).1).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let perturbation_norm = if norm_a > 0.0 { norm_delta / norm_a } else { 0.0 };
        return Ok(GeneratedProblem { matrix, rhs, x_star: vec![1.0; n], perturbation_norm });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eft::UNIT_ROUNDOFF;
    use crate::oracle::{ExactValue, ToExact};
    use crate::sparse::{laplacian_2d, random_spd, scaled_laplacian_2d};

    fn max_row_len(m: &CsrMatrix) -> f64 {
        (0..m.n_rows()).map(|i| m.row(i).0.len()).max().unwrap_or(0) as f64
    }

    fn exact_residual_is_zero(p: &GeneratedProblem) -> bool {
        (0..p.matrix.n_rows()).all(|i| {
            let s = p.matrix.row(i).1.iter().fold(ExactValue::zero(), |acc, v| &acc + &v.exact());
            s == p.rhs[i].exact()
        })
    }

    #[test]
    fn pow2_and_ilog2() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(-1074), f64::from_bits(1));
        assert_eq!(pow2(-1030), 2f64.powi(-1000) * 2f64.powi(-30));
        for x in [1.0, 3.0, 0.75, 1e-310, f64::MAX, f64::from_bits(1)] {
            let k = ilog2(x);
            assert!(pow2(k) <= x && (k == 1023 || x < pow2(k + 1)), "{x}");
        }
    }

    #[test]
    fn identity_and_laplacian_are_unchanged() {
        let p = generate(&CsrMatrix::identity(5)).unwrap();
        assert_eq!(p.rhs, vec![1.0; 5]);
        assert_eq!(p.perturbation_norm, 0.0);
        let l = laplacian_2d(6);
        let p = generate(&l).unwrap();
        assert_eq!(p.matrix, l);
        assert_eq!(p.perturbation_norm, 0.0);
        assert!(p.rhs.iter().all(|b| [0.0, 1.0, 2.0].contains(b)));
    }

    #[test]
    fn random_matrix_gets_exact_rhs() {
        let a = random_spd(120, 0.05, 21);
        let p = generate(&a).unwrap();
        assert!(p.matrix.is_symmetric());
        assert!(exact_residual_is_zero(&p));
        assert!(p.perturbation_norm > 0.0);
        assert!(p.perturbation_norm <= 2.0 * max_row_len(&a) * UNIT_ROUNDOFF);
        assert!(p.x_star.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn scaled_matrix_gets_exact_rhs() {
        let a = scaled_laplacian_2d(10, 8.0, 5);
        let p = generate(&a).unwrap();
        assert!(p.matrix.is_symmetric());
        assert!(exact_residual_is_zero(&p));
        assert!(p.perturbation_norm <= 2.0 * max_row_len(&a) * UNIT_ROUNDOFF);
    }

    #[test]
    fn rejects_bad_input() {
        let rect = CsrMatrix::from_triplets(2, 3, [(0, 0, 1.0)]).unwrap();
        assert!(matches!(generate(&rect), Err(GenerateError::NotSquare(2, 3))));
        let asym = CsrMatrix::from_triplets(2, 2, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(generate(&asym), Err(GenerateError::NotSymmetric)));
        let nan = CsrMatrix::from_triplets(2, 2, [(1, 1, f64::NAN)]).unwrap();
        assert!(matches!(generate(&nan), Err(GenerateError::NonFinite { row: 1 })));
    }

    #[test]
    fn zero_rows_are_kept() {
        let a = CsrMatrix::from_triplets(3, 3, [(0, 0, 0.3), (2, 2, 0.1)]).unwrap();
        let p = generate(&a).unwrap();
        assert_eq!(p.rhs[1], 0.0);
        assert!(exact_residual_is_zero(&p));
    }
}
