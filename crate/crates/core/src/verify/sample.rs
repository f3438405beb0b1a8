//! Seeded random operands for the oracle suites.
//!
//! "Well-scaled" operands have magnitudes in `[2^-20, 2^20)` and full random
//! significands. Normalized multi-word samples place each lower word strictly
//! below half an ulp of the word above it.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::multiword::{DoubleWord, TripleWord};

pub use rand::SeedableRng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random significand in `[1, 2)` scaled by `2^e` for `e` in `exp_range`,
/// random sign.
pub fn f64_with_exponent(rng: &mut SampleRng, exp_range: std::ops::RangeInclusive<i32>) -> f64 {
    let m = f64::from_bits(0x3ff0_0000_0000_0000 | (rng.gen::<u64>() >> 12));
    let e = rng.gen_range(exp_range);
    let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    s * m * 2f64.powi(e)
}

pub fn well_scaled_f64(rng: &mut SampleRng) -> f64 {
    f64_with_exponent(rng, -20..=19)
}

/// Factor in `(-2^-54, 2^-54)` with a random significand.
fn tail_factor(rng: &mut SampleRng) -> f64 {
    rng.gen_range(-1.0..1.0) * 2f64.powi(-54)
}

pub fn normalized_dw(rng: &mut SampleRng) -> DoubleWord {
    let hi = well_scaled_f64(rng);
    DoubleWord::new(hi, hi * tail_factor(rng))
}

pub fn normalized_tw(rng: &mut SampleRng) -> TripleWord {
    let hi = well_scaled_f64(rng);
    let mid = hi * tail_factor(rng);
    TripleWord::new(hi, mid, mid * tail_factor(rng))
}

/// Same-sign copy of `b` relative to `a`, so additions do not cancel.
pub fn same_sign_dw(a: DoubleWord, b: DoubleWord) -> DoubleWord {
    if (a.w0 < 0.0) == (b.w0 < 0.0) {
        b
    } else {
        -b
    }
}

pub fn same_sign_tw(a: TripleWord, b: TripleWord) -> TripleWord {
    if (a.w0 < 0.0) == (b.w0 < 0.0) {
        b
    } else {
        -b
    }
}

/// Words with unrelated signs and overlapping bits, as a quasi result can
/// hold. The low word never exceeds the high word in magnitude.
pub fn quasi_dw(rng: &mut SampleRng) -> DoubleWord {
    let hi = well_scaled_f64(rng);
    let gap = rng.gen_range(1..60);
    DoubleWord::new(hi, f64_with_exponent(rng, 0..=0) * hi.abs() * 2f64.powi(-gap))
}

/// Three overlapping words of any relative size ordering.
pub fn quasi_tw(rng: &mut SampleRng) -> TripleWord {
    let hi = well_scaled_f64(rng);
    let g1 = rng.gen_range(0..60);
    let g2 = rng.gen_range(0..60);
    let mid = f64_with_exponent(rng, 0..=0) * hi.abs() * 2f64.powi(-g1);
    TripleWord::new(hi, mid, f64_with_exponent(rng, 0..=0) * mid.abs() * 2f64.powi(-g2))
}
