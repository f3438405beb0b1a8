//! Sparse matrices in CSR form, Matrix Market I/O and synthetic generators.
//!
//! Matrix values are always FP64; only vectors carry multi-word elements.

mod csr;
pub mod mtx;
mod synthetic;

pub use csr::{expand_symmetric, CsrError, CsrMatrix};
pub use mtx::{read_matrix_market, read_matrix_market_file, MatrixMarket, MtxError, Symmetry};
pub use synthetic::{laplacian_2d, random_spd, scaled_laplacian_2d, Synthetic, SyntheticParseError};
