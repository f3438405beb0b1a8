//! Double-word and triple-word arithmetic, normalized and quasi.
//!
//! The normalized/quasi distinction is not tracked at runtime: both families
//! share [`DoubleWord`] and [`TripleWord`], and it is the operation that
//! decides whether its result is normalized. Subtraction is addition of the
//! negated operand (negation is exact).
//!
//! Division is long division on FP64 quotient digits (one digit more than
//! the output width), with remainders formed in the matching arithmetic.
//! A divisor whose value is zero yields the FP64 quotient of the collapsed
//! values in the high word and zeros below it.

mod double;
mod text;
mod triple;

pub use double::{
    dw_add, dw_div, dw_mul, dw_sub, dxdw_add, dxdw_mul, dxqdw_add, dxqdw_mul, normalize_dw, qdw_add, qdw_div, qdw_mul,
    qdw_sub, DoubleWord,
};
pub use text::{format_hex_f64, parse_hex_f64, ParseHexError};
pub use triple::{
    dxqtw_add, dxqtw_mul, dxtw_add, dxtw_mul, normalize_tw, qtw_add, qtw_div, qtw_mul, qtw_sub, tw_add, tw_div, tw_mul,
    tw_sub, TripleWord,
};
