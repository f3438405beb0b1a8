//! Ground truth for testing: exact dyadic arithmetic and an operation
//! counting scalar.
//!
//! Every finite FP64 value is a dyadic rational, and so are sums and products
//! of them, so [`ExactValue`] never rounds. Division is checked by
//! multiplying back rather than being provided here.

mod counting;
mod exact;

pub use counting::{count_ops, op_count, reset_op_count, CountingScalar};
pub use exact::{relative_error, ExactValue, OracleError, ToExact};
