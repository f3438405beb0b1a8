//! Multi-word floating-point arithmetic on FP64 and a Conjugate Gradient
//! harness built on top of it.
//!
//! Four extended arithmetics are provided next to plain FP64:
//!
//! * double-word (DW, ~106-bit significand) and its quasi variant (QDW),
//! * triple-word (TW, ~159-bit significand) and its quasi variant (QTW).
//!
//! The quasi variants skip the per-operation renormalization, so their
//! components may overlap; [`multiword::normalize_dw`] and
//! [`multiword::normalize_tw`] restore a (near) non-overlapping form without
//! changing the represented value.
//!
//! Everything assumes IEEE-754 binary64 with round-to-nearest-even and a
//! fused multiply-add (see [`eft::fma_is_fused`]).

pub mod cg;
pub mod eft;
pub mod kernels;
pub mod multiword;
pub mod oracle;
pub mod problemgen;
pub mod sparse;
pub mod verify;

pub use cg::{cg_solve, Normalization, SolverConfig, SolverResult, Termination};
pub use eft::{Fp64Pair, Scalar};
pub use kernels::{Exec, Mode};
pub use multiword::{DoubleWord, TripleWord};
pub use oracle::{CountingScalar, ExactValue};
pub use sparse::CsrMatrix;
