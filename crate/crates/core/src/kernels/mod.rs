//! SpMV and BLAS-1 kernels over the five arithmetics.
//!
//! Kernels are generic over an [`Arithmetic`] marker type ([`Fp64`], [`Dw`],
//! [`Qdw`], [`Tw`], [`Qtw`]); [`with_arithmetic!`](crate::with_arithmetic)
//! turns a runtime [`Mode`] into a monomorphized call. The matrix is always
//! FP64 and enters through the mixed FP64 x multi-word product.
//!
//! No kernel takes the square root of a multi-word value: the FP64 norm
//! collapses elements first, and the TW metrics take one FP64 square root of
//! a collapsed TW ratio.

mod arith;
mod exec;
mod ops;

pub use arith::{Arithmetic, Dw, Fp64, Mode, ParseModeError, Qdw, Qtw, Tw};
pub use exec::{Exec, ExecError};
pub use ops::{
    axpy, dot, norm2_fp64, norm_metrics_tw, normalize_vector, relative_error_tw, scal_then_add, spmv, true_residual_tw,
    DimensionError, MultiwordVector,
};

#[cfg(test)]
mod tests;
