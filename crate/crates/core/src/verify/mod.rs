//! Self-checks against the exact oracle: error-free transformations,
//! operation counts, precision floors, normalization and problem generation.
//!
//! Each suite returns a [`SuiteReport`]; [`run_all`] runs them in order. The
//! FP64 operations under test are taken from an [`Implementations`] table so
//! a deliberately broken operation can be substituted to check that the
//! suites notice.

pub mod sample;

use crate::eft::{fma_is_fused, quick_two_sum, rounds_to_nearest_even, two_prod_fma, two_sum, Fp64Pair};
use crate::multiword::{
    dw_add, dw_div, dw_mul, dxdw_add, dxdw_mul, dxqdw_add, dxqdw_mul, dxqtw_add, dxqtw_mul, dxtw_add, dxtw_mul,
    normalize_dw, normalize_tw, qdw_add, qdw_div, qdw_mul, qtw_add, qtw_div, qtw_mul, tw_add, tw_div, tw_mul,
    DoubleWord, TripleWord,
};
use crate::oracle::{count_ops, relative_error, CountingScalar, ExactValue, ToExact};
use crate::problemgen::generate;
use crate::sparse::{laplacian_2d, random_spd};

use sample::{normalized_dw, normalized_tw, quasi_dw, quasi_tw, same_sign_dw, same_sign_tw, SampleRng};

/// Relative error floor for DW-family operations.
pub const DW_FLOOR: f64 = 7.888609052210118e-31; // 2^-100
/// Relative error floor for TW-family operations.
pub const TW_FLOOR: f64 = 7.006492321624085e-46; // 2^-150
/// Allowed single-operation degradation of a quasi operation.
pub const QUASI_FACTOR: f64 = 8.0;
/// Division may be this much less accurate than multiplication.
pub const DIV_FACTOR: f64 = 4.0;

type Dw = DoubleWord<f64>;
type Tw = TripleWord<f64>;

/// The FP64 operations exercised by the suites.
#[derive(Clone, Copy)]
pub struct Implementations {
    pub two_sum: fn(f64, f64) -> Fp64Pair,
    pub quick_two_sum: fn(f64, f64) -> Fp64Pair,
    pub two_prod_fma: fn(f64, f64) -> Fp64Pair,
    pub dw_add: fn(Dw, Dw) -> Dw,
    pub dw_mul: fn(Dw, Dw) -> Dw,
    pub dw_div: fn(Dw, Dw) -> Dw,
    pub qdw_add: fn(Dw, Dw) -> Dw,
    pub qdw_mul: fn(Dw, Dw) -> Dw,
    pub qdw_div: fn(Dw, Dw) -> Dw,
    pub tw_add: fn(Tw, Tw) -> Tw,
    pub tw_mul: fn(Tw, Tw) -> Tw,
    pub tw_div: fn(Tw, Tw) -> Tw,
    pub qtw_add: fn(Tw, Tw) -> Tw,
    pub qtw_mul: fn(Tw, Tw) -> Tw,
    pub qtw_div: fn(Tw, Tw) -> Tw,
    pub normalize_dw: fn(Dw) -> Dw,
    pub normalize_tw: fn(Tw) -> Tw,
}

impl Default for Implementations {
    fn default() -> Self {
        Self {
            two_sum: two_sum::<f64>,
            quick_two_sum: quick_two_sum::<f64>,
            two_prod_fma: two_prod_fma::<f64>,
            dw_add: dw_add::<f64>,
            dw_mul: dw_mul::<f64>,
            dw_div: dw_div::<f64>,
            qdw_add: qdw_add::<f64>,
            qdw_mul: qdw_mul::<f64>,
            qdw_div: qdw_div::<f64>,
            tw_add: tw_add::<f64>,
            tw_mul: tw_mul::<f64>,
            tw_div: tw_div::<f64>,
            qtw_add: qtw_add::<f64>,
            qtw_mul: qtw_mul::<f64>,
            qtw_div: qtw_div::<f64>,
            normalize_dw: normalize_dw::<f64>,
            normalize_tw: normalize_tw::<f64>,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random pairs per error-free transformation.
    pub eft_samples: usize,
    /// Random operand pairs per precision check.
    pub precision_samples: usize,
    /// Random quasi values per normalization.
    pub normalize_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { eft_samples: 1_000_000, precision_samples: 100_000, normalize_samples: 100_000, seed: 2024 }
    }
}

impl VerifyOptions {
    /// Small sample counts for quick smoke runs.
    pub fn quick() -> Self {
        Self { eft_samples: 20_000, precision_samples: 5_000, normalize_samples: 5_000, seed: 2024 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self { name, passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

pub const SUITES: [&str; 7] =
    ["environment", "eft", "op-counts", "precision", "normalization", "mixed-ops", "problemgen"];

pub fn run_all(opts: &VerifyOptions, imp: &Implementations) -> Vec<SuiteReport> {
    SUITES.iter().map(|name| run_suite(name, opts, imp).expect("known suite")).collect()
}

pub fn run_suite(name: &str, opts: &VerifyOptions, imp: &Implementations) -> Option<SuiteReport> {
    Some(match name {
        "environment" => environment(),
        "eft" => eft(opts, imp),
        "op-counts" => op_counts(),
        "precision" => precision(opts, imp),
        "normalization" => normalization(opts, imp),
        "mixed-ops" => mixed_ops(opts),
        "problemgen" => problem_generation(),
        _ => return None,
    })
}

pub fn environment() -> SuiteReport {
    let mut r = SuiteReport::new("environment");
    r.check(rounds_to_nearest_even(), "FP64 rounding is to nearest, ties to even".into());
    r.check(fma_is_fused(), "mul_add rounds once".into());
    r
}

fn ex(x: f64) -> ExactValue {
    x.exact()
}

pub fn eft(opts: &VerifyOptions, imp: &Implementations) -> SuiteReport {
    let mut r = SuiteReport::new("eft");
    let mut rng = sample::rng(opts.seed);
    let (mut sum_fail, mut quick_fail, mut prod_fail) = (0usize, 0usize, 0usize);
    for _ in 0..opts.eft_samples {
        let a = sample::f64_with_exponent(&mut rng, -500..=500);
        let b = sample::f64_with_exponent(&mut rng, -500..=500);
        let s = (imp.two_sum)(a, b);
        if &ex(s.hi) + &ex(s.lo) != &ex(a) + &ex(b) || s.hi + s.lo != s.hi {
            sum_fail += 1;
        }
        let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
        if (imp.quick_two_sum)(big, small) != s {
            quick_fail += 1;
        }
        let a = sample::f64_with_exponent(&mut rng, -450..=450);
        let b = sample::f64_with_exponent(&mut rng, -450..=450);
        let p = (imp.two_prod_fma)(a, b);
        if &ex(p.hi) + &ex(p.lo) != &ex(a) * &ex(b) || p.hi + p.lo != p.hi {
            prod_fail += 1;
        }
    }
    let n = opts.eft_samples;
    r.check(sum_fail == 0, format!("two_sum error-free on {n} pairs ({sum_fail} failures)"));
    r.check(quick_fail == 0, format!("quick_two_sum equals two_sum when |a| >= |b| ({quick_fail} mismatches)"));
    r.check(prod_fail == 0, format!("two_prod_fma error-free on {n} pairs ({prod_fail} failures)"));
    r
}

fn cdw(x: Dw) -> DoubleWord<CountingScalar> {
    DoubleWord::new(CountingScalar(x.w0), CountingScalar(x.w1))
}

fn ctw(x: Tw) -> TripleWord<CountingScalar> {
    TripleWord::new(CountingScalar(x.w0), CountingScalar(x.w1), CountingScalar(x.w2))
}

fn c<R>(f: impl FnOnce() -> R) -> u64 {
    count_ops(|| std::hint::black_box(f())).1
}

/// FP64 operation counts of one call on the counting scalar.
pub fn measured_counts() -> Vec<(&'static str, u64)> {
    let mut rng = sample::rng(7);
    let (a, b) = (normalized_dw(&mut rng), normalized_dw(&mut rng));
    let (t, u) = (normalized_tw(&mut rng), normalized_tw(&mut rng));
    let (x, y) = (CountingScalar(a.w0), CountingScalar(b.w0));
    let small = CountingScalar(b.w0 * 1e-20);
    let (da, db, ta, tb) = (cdw(a), cdw(b), ctw(t), ctw(u));
    vec![
        ("two_sum", c(|| two_sum(x, y))),
        ("quick_two_sum", c(|| quick_two_sum(x, small))),
        ("two_prod_fma", c(|| two_prod_fma(x, y))),
        ("dw_add", c(|| dw_add(da, db))),
        ("dw_mul", c(|| dw_mul(da, db))),
        ("qdw_add", c(|| qdw_add(da, db))),
        ("qdw_mul", c(|| qdw_mul(da, db))),
        ("qtw_add", c(|| qtw_add(ta, tb))),
        ("qtw_mul", c(|| qtw_mul(ta, tb))),
        ("tw_add", c(|| tw_add(ta, tb))),
        ("tw_mul", c(|| tw_mul(ta, tb))),
        ("dxdw_add", c(|| dxdw_add(x, db))),
        ("dxdw_mul", c(|| dxdw_mul(x, db))),
        ("dxqdw_add", c(|| dxqdw_add(x, db))),
        ("dxqdw_mul", c(|| dxqdw_mul(x, db))),
        ("dxtw_add", c(|| dxtw_add(x, tb))),
        ("dxtw_mul", c(|| dxtw_mul(x, tb))),
        ("dxqtw_add", c(|| dxqtw_add(x, tb))),
        ("dxqtw_mul", c(|| dxqtw_mul(x, tb))),
        ("normalize_dw", c(|| normalize_dw(da))),
        ("normalize_tw", c(|| normalize_tw(ta))),
    ]
}

pub fn op_counts() -> SuiteReport {
    let mut r = SuiteReport::new("op-counts");
    let counts = measured_counts();
    let get = |name: &str| counts.iter().find(|(n, _)| *n == name).map(|&(_, c)| c).unwrap_or(0);
    for (name, got, want) in [
        ("two_sum", get("two_sum"), 6),
        ("quick_two_sum", get("quick_two_sum"), 3),
        ("two_prod_fma", get("two_prod_fma"), 2),
        ("dw_add", get("dw_add"), 11),
        ("dw_mul", get("dw_mul"), 7),
        ("qdw_add", get("qdw_add"), 8),
        ("qdw_mul", get("qdw_mul"), 4),
        ("qtw_add", get("qtw_add"), 21),
        ("qtw_mul", get("qtw_mul"), 24),
    ] {
        r.check(got == want, format!("{name} = {got} (expected {want})"));
    }
    for (mixed, full) in [
        ("dxdw_add", "dw_add"),
        ("dxdw_mul", "dw_mul"),
        ("dxqdw_add", "qdw_add"),
        ("dxqdw_mul", "qdw_mul"),
        ("dxtw_add", "tw_add"),
        ("dxtw_mul", "tw_mul"),
        ("dxqtw_add", "qtw_add"),
        ("dxqtw_mul", "qtw_mul"),
    ] {
        let (m, f) = (get(mixed), get(full));
        r.check(m < f, format!("{mixed} = {m} < {full} = {f}"));
    }
    let (lo_add, hi_add, lo_mul, hi_mul) = tw_count_range(200);
    r.details.push(format!("info tw_add = {lo_add}..={hi_add}, tw_mul = {lo_mul}..={hi_mul} (branch dependent)"));
    r
}

/// Range of TW add/mul operation counts over random normalized operands.
pub fn tw_count_range(samples: usize) -> (u64, u64, u64, u64) {
    let mut rng = sample::rng(11);
    let (mut a, mut m) = ((u64::MAX, 0), (u64::MAX, 0));
    for _ in 0..samples {
        let (x, y) = (ctw(normalized_tw(&mut rng)), ctw(normalized_tw(&mut rng)));
        let ca = count_ops(|| tw_add(x, y)).1;
        let cm = count_ops(|| tw_mul(x, y)).1;
        a = (a.0.min(ca), a.1.max(ca));
        m = (m.0.min(cm), m.1.max(cm));
    }
    (a.0, a.1, m.0, m.1)
}

/// Maximum relative errors observed by [`precision`], keyed by operation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrecisionStats {
    pub dw_add: f64,
    pub dw_mul: f64,
    pub dw_div: f64,
    pub qdw_add: f64,
    pub qdw_mul: f64,
    pub qdw_div: f64,
    pub tw_add: f64,
    pub tw_mul: f64,
    pub tw_div: f64,
    pub qtw_add: f64,
    pub qtw_mul: f64,
    pub qtw_div: f64,
}

fn upd(slot: &mut f64, e: f64) {
    if e > *slot || e.is_nan() {
        *slot = if e.is_nan() { f64::INFINITY } else { e };
    }
}

/// Relative error of a computed quotient `q ~ a / b`, measured exactly as
/// `|q b - a| / |a|`.
fn quotient_error(q: &ExactValue, a: &ExactValue, b: &ExactValue) -> f64 {
    relative_error(&(q * b), a)
}

/// Measures maximum relative errors over same-sign (for addition) random
/// normalized operands.
pub fn precision_stats(samples: usize, seed: u64, imp: &Implementations) -> PrecisionStats {
    let mut s = PrecisionStats::default();
    let mut rng: SampleRng = sample::rng(seed);
    for _ in 0..samples {
        let a = normalized_dw(&mut rng);
        let b = same_sign_dw(a, normalized_dw(&mut rng));
        let (ea, eb) = (a.exact(), b.exact());
        let sum = &ea + &eb;
        let prod = &ea * &eb;
        upd(&mut s.dw_add, relative_error(&(imp.dw_add)(a, b).exact(), &sum));
        upd(&mut s.qdw_add, relative_error(&(imp.qdw_add)(a, b).exact(), &sum));
        upd(&mut s.dw_mul, relative_error(&(imp.dw_mul)(a, b).exact(), &prod));
        upd(&mut s.qdw_mul, relative_error(&(imp.qdw_mul)(a, b).exact(), &prod));
        upd(&mut s.dw_div, quotient_error(&(imp.dw_div)(a, b).exact(), &ea, &eb));
        upd(&mut s.qdw_div, quotient_error(&(imp.qdw_div)(a, b).exact(), &ea, &eb));

        let a = normalized_tw(&mut rng);
        let b = same_sign_tw(a, normalized_tw(&mut rng));
        let (ea, eb) = (a.exact(), b.exact());
        let sum = &ea + &eb;
        let prod = &ea * &eb;
        upd(&mut s.tw_add, relative_error(&(imp.tw_add)(a, b).exact(), &sum));
        upd(&mut s.qtw_add, relative_error(&(imp.qtw_add)(a, b).exact(), &sum));
        upd(&mut s.tw_mul, relative_error(&(imp.tw_mul)(a, b).exact(), &prod));
        upd(&mut s.qtw_mul, relative_error(&(imp.qtw_mul)(a, b).exact(), &prod));
        upd(&mut s.tw_div, quotient_error(&(imp.tw_div)(a, b).exact(), &ea, &eb));
        upd(&mut s.qtw_div, quotient_error(&(imp.qtw_div)(a, b).exact(), &ea, &eb));
    }
    s
}

fn log2(e: f64) -> f64 {
    if e == 0.0 {
        f64::NEG_INFINITY
    } else {
        e.log2()
    }
}

pub fn precision(opts: &VerifyOptions, imp: &Implementations) -> SuiteReport {
    let mut r = SuiteReport::new("precision");
    let s = precision_stats(opts.precision_samples, opts.seed ^ 0x5eed, imp);
    let n = opts.precision_samples;
    for (name, got, floor) in [
        ("dw_add", s.dw_add, DW_FLOOR),
        ("dw_mul", s.dw_mul, DW_FLOOR),
        ("tw_add", s.tw_add, TW_FLOOR),
        ("tw_mul", s.tw_mul, TW_FLOOR),
    ] {
        r.check(got <= floor, format!("{name} max rel err 2^{:.1} <= 2^{:.0} over {n} pairs", log2(got), log2(floor)));
    }
    for (name, got, base) in [
        ("qdw_add", s.qdw_add, s.dw_add),
        ("qdw_mul", s.qdw_mul, s.dw_mul),
        ("qtw_add", s.qtw_add, s.tw_add),
        ("qtw_mul", s.qtw_mul, s.tw_mul),
    ] {
        r.check(
            got <= QUASI_FACTOR * base,
            format!("{name} max rel err 2^{:.1} <= 8 x normalized 2^{:.1}", log2(got), log2(base)),
        );
    }
    for (name, got, bound) in [
        ("dw_div", s.dw_div, DIV_FACTOR * DW_FLOOR),
        ("qdw_div", s.qdw_div, DIV_FACTOR * DW_FLOOR),
        ("tw_div", s.tw_div, DIV_FACTOR * TW_FLOOR),
        ("qtw_div", s.qtw_div, DIV_FACTOR * TW_FLOOR),
    ] {
        r.check(got <= bound, format!("{name} max rel err 2^{:.1} <= 4 x mul floor 2^{:.0}", log2(got), log2(bound)));
    }
    r
}

pub fn normalization(opts: &VerifyOptions, imp: &Implementations) -> SuiteReport {
    let mut r = SuiteReport::new("normalization");
    let mut rng = sample::rng(opts.seed ^ 0x4e0);
    let (mut dw_fail, mut tw_fail, mut dw_unnormalized) = (0, 0, 0);
    for _ in 0..opts.normalize_samples {
        let d = quasi_dw(&mut rng);
        let nd = (imp.normalize_dw)(d);
        dw_fail += usize::from(nd.exact() != d.exact());
        dw_unnormalized += usize::from(!nd.is_normalized());
        let t = quasi_tw(&mut rng);
        tw_fail += usize::from((imp.normalize_tw)(t).exact() != t.exact());
    }
    let n = opts.normalize_samples;
    r.check(dw_fail == 0, format!("normalize_dw preserves value on {n} quasi inputs ({dw_fail} failures)"));
    r.check(dw_unnormalized == 0, format!("normalize_dw output normalized ({dw_unnormalized} failures)"));
    r.check(tw_fail == 0, format!("normalize_tw preserves value on {n} quasi inputs ({tw_fail} failures)"));
    r
}

/// Mixed FP64 x multi-word operations against their full-width versions on
/// promoted operands.
pub fn mixed_ops(opts: &VerifyOptions) -> SuiteReport {
    let mut r = SuiteReport::new("mixed-ops");
    let mut rng = sample::rng(opts.seed ^ 0x3d);
    let n = opts.precision_samples.min(20_000);
    let mut exact_mismatch = 0usize;
    let mut quasi_err = 0.0f64;
    let mut quasi_ref = 0.0f64;
    for _ in 0..n {
        let a = sample::well_scaled_f64(&mut rng);
        let (b, t) = (normalized_dw(&mut rng), normalized_tw(&mut rng));
        let (ad, at) = (DoubleWord::from_f64(a), TripleWord::from_f64(a));
        exact_mismatch += usize::from(dxdw_add(a, b) != dw_add(ad, b));
        exact_mismatch += usize::from(dxdw_mul(a, b) != dw_mul(ad, b));
        exact_mismatch += usize::from(dxqdw_add(a, b) != qdw_add(ad, b));
        exact_mismatch += usize::from(dxqdw_mul(a, b) != qdw_mul(ad, b));
        exact_mismatch += usize::from(dxtw_add(a, t) != tw_add(at, t));
        exact_mismatch += usize::from(dxtw_mul(a, t) != tw_mul(at, t));
        exact_mismatch += usize::from(dxqtw_add(a, t) != qtw_add(at, t));
        let prod = &ex(a) * &t.exact();
        quasi_err = quasi_err.max(relative_error(&dxqtw_mul(a, t).exact(), &prod));
        quasi_ref = quasi_ref.max(relative_error(&qtw_mul(at, t).exact(), &prod));
    }
    r.check(
        exact_mismatch == 0,
        format!("mixed ops equal full-width ops on promoted operands ({exact_mismatch} mismatches)"),
    );
    r.check(
        quasi_err <= TW_FLOOR && quasi_ref <= TW_FLOOR,
        format!("dxqtw_mul 2^{:.1}, qtw_mul 2^{:.1} within TW floor", log2(quasi_err), log2(quasi_ref)),
    );
    r
}

pub fn problem_generation() -> SuiteReport {
    let mut r = SuiteReport::new("problemgen");
    for (name, m) in [("laplacian2d:32", laplacian_2d(32)), ("random-spd:200", random_spd(200, 0.05, 200))] {
        match generate(&m) {
            Ok(p) => {
                let bad = (0..p.matrix.n_rows())
                    .filter(|&i| {
                        let s = p.matrix.row(i).1.iter().fold(ExactValue::zero(), |acc, v| &acc + &ex(*v));
                        s != ex(p.rhs[i])
                    })
                    .count();
                r.check(
                    bad == 0 && p.matrix.is_symmetric(),
                    format!(
                        "{name}: exact residual b - A*ones is zero ({bad} bad rows), perturbation {:.2e}",
                        p.perturbation_norm
                    ),
                );
            }
            Err(e) => r.check(false, format!("{name}: {e}")),
        }
    }
    r
}
