//! Unpreconditioned Conjugate Gradient over any of the five arithmetics.
//!
//! The iteration is the textbook one:
//!
//! ```text
//! p = r = b - A x0;  rho = r.r
//! loop:
//!     q = A p;  alpha = rho / p.q
//!     x += alpha p;  r -= alpha q;  rho' = r.r
//!     stop if ||r|| / ||b|| < eps      (FP64 norms)
//!     beta = rho' / rho;  p = r + beta p
//! ```
//!
//! Vectors and the scalars `rho`, `alpha`, `beta` live in the selected
//! arithmetic. In the quasi modes the residual is renormalized right after
//! its update by default ([`Normalization::AfterResidualAxpy`]); without it
//! the overlap between words grows and convergence can be lost.
//!
//! TW-accurate error and residual norms are sampled into the history every
//! `history_stride` iterations. They never influence control flow and their
//! cost is excluded from the reported times.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::kernels::{
    axpy, dot, norm2_fp64, norm_metrics_tw, normalize_vector, scal_then_add, spmv, Arithmetic, DimensionError, Exec,
    Fp64, Mode, MultiwordVector,
};
use crate::multiword::TripleWord;
use crate::sparse::CsrMatrix;
use crate::with_arithmetic;

/// Where quasi-mode vectors are renormalized. Ignored in the other modes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Renormalize `r` after `r -= alpha q`.
    #[default]
    AfterResidualAxpy,
    /// Never renormalize.
    None,
    /// Renormalize every vector a kernel writes (`x`, `r`, `p`, `q`).
    EveryVectorOp,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::AfterResidualAxpy => "after-axpy",
            Normalization::None => "none",
            Normalization::EveryVectorOp => "every-op",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown normalization `{0}` (expected after-axpy, none or every-op)")]
pub struct ParseNormalizationError(pub String);

impl FromStr for Normalization {
    type Err = ParseNormalizationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Normalization::AfterResidualAxpy, Normalization::None, Normalization::EveryVectorOp]
            .into_iter()
            .find(|n| n.as_str() == s.trim())
            .ok_or_else(|| ParseNormalizationError(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Relative residual tolerance, compared against `||r|| / ||b||` in FP64.
    pub epsilon: f64,
    /// `None` means `10 n`.
    pub max_iterations: Option<usize>,
    pub normalization: Normalization,
    /// Sample the TW metrics every this many iterations; 0 disables the
    /// history.
    pub history_stride: usize,
}

impl SolverConfig {
    pub const DEFAULT_HISTORY_STRIDE: usize = 100;

    pub fn new(mode: Mode, epsilon: f64) -> Self {
        Self {
            mode,
            epsilon,
            max_iterations: None,
            normalization: Normalization::default(),
            history_stride: Self::DEFAULT_HISTORY_STRIDE,
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = Some(n);
        self
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn with_history_stride(mut self, s: usize) -> Self {
        self.history_stride = s;
        self
    }

    pub fn iteration_limit(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(10 * n).max(1)
    }

    fn validate(&self) -> Result<(), CgError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CgError::Epsilon(self.epsilon));
        }
        if self.max_iterations == Some(0) {
            return Err(CgError::ZeroIterations);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CgError {
    #[error("epsilon must be positive and finite, got {0}")]
    Epsilon(f64),
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// `p.q` or the residual norm became zero or NaN before convergence.
    Breakdown,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max-iterations",
            Termination::Breakdown => "breakdown",
        }
    }
}

/// One sample of the convergence history.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub iteration: usize,
    /// `||r_k|| / ||b||` from the recurrence, in FP64.
    pub recurrence_residual: f64,
    /// `||b - A x_k|| / ||b||`, TW-accurate.
    pub true_residual: f64,
    /// `||x_k - x*|| / ||x*||`, TW-accurate; present when `x*` is known.
    pub error_norm: Option<f64>,
}

/// Wall-clock time spent in each kernel over a solve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelTimes {
    pub spmv: Duration,
    pub dot: Duration,
    pub axpy: Duration,
    pub scal_then_add: Duration,
    pub normalize: Duration,
    pub norm: Duration,
    pub scalar: Duration,
}

impl KernelTimes {
    pub fn entries(&self) -> [(&'static str, Duration); 7] {
        [
            ("spmv", self.spmv),
            ("dot", self.dot),
            ("axpy", self.axpy),
            ("scal_then_add", self.scal_then_add),
            ("normalize", self.normalize),
            ("norm", self.norm),
            ("scalar", self.scalar),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub mode: Mode,
    pub termination: Termination,
    pub iterations: usize,
    pub final_recurrence_residual: f64,
    /// Solve time, excluding history sampling.
    pub elapsed: Duration,
    pub kernel_times: KernelTimes,
    pub history: Vec<ConvergenceRecord>,
    /// Final iterate, widened exactly to triple words.
    pub solution: Vec<TripleWord>,
    pub final_true_residual: f64,
    pub final_error_norm: Option<f64>,
}

impl SolverResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// The final iterate collapsed to FP64.
    pub fn solution_f64(&self) -> Vec<f64> {
        self.solution.iter().map(|t| t.collapse()).collect()
    }
}

/// Iteration state: the four CG vectors and the scalars in arithmetic `A`.
pub struct SolverState<A: Arithmetic> {
    pub x: MultiwordVector<A>,
    pub r: MultiwordVector<A>,
    pub p: MultiwordVector<A>,
    pub q: MultiwordVector<A>,
    pub rho: A::Elem,
    pub alpha: A::Elem,
    pub beta: A::Elem,
    pub iteration: usize,
}

/// Samples the three norms for the current state.
pub fn record_metrics<A: Arithmetic>(
    exec: &Exec,
    state: &SolverState<A>,
    m: &CsrMatrix,
    b: &[f64],
    b_norm: f64,
    x_star: Option<&[f64]>,
) -> Result<ConvergenceRecord, DimensionError> {
    let (error_norm, true_residual) = norm_metrics_tw::<A>(exec, m, &state.x, x_star, b)?;
    Ok(ConvergenceRecord {
        iteration: state.iteration,
        recurrence_residual: relative(norm2_fp64::<A>(exec, &state.r), b_norm),
        true_residual,
        error_norm,
    })
}

fn relative(r: f64, b: f64) -> f64 {
    if b == 0.0 {
        r
    } else {
        r / b
    }
}

fn timed<R>(slot: &mut Duration, f: impl FnOnce() -> R) -> R {
    let t = Instant::now();
    let r = f();
    *slot += t.elapsed();
    r
}

/// Solves `A x = b` from `x0` (zero when `None`) in the arithmetic selected
/// by `cfg.mode`. `A` must be symmetric positive definite; this is not
/// checked.
pub fn cg_solve(
    exec: &Exec,
    m: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
    x_star: Option<&[f64]>,
) -> Result<SolverResult, CgError> {
    with_arithmetic!(cfg.mode, A => {
        let x0 = match x0 {
            Some(x) => MultiwordVector::<A>::from_f64(x),
            None => MultiwordVector::<A>::zeros(m.n_cols()),
        };
        cg_solve_in::<A>(exec, m, b, x0, cfg, x_star)
    })
}

/// [`cg_solve`] for a statically chosen arithmetic and a multi-word initial
/// guess. `cfg.mode` is ignored in favour of `A`.
pub fn cg_solve_in<A: Arithmetic>(
    exec: &Exec,
    m: &CsrMatrix,
    b: &[f64],
    x0: MultiwordVector<A>,
    cfg: &SolverConfig,
    x_star: Option<&[f64]>,
) -> Result<SolverResult, CgError> {
    cfg.validate()?;
    if !m.is_square() {
        return Err(CgError::NotSquare(m.n_rows(), m.n_cols()));
    }
    let n = m.n_rows();
    if b.len() != n {
        return Err(DimensionError { kernel: "cg (b)", expected: n, found: b.len() }.into());
    }
    if x0.len() != n {
        return Err(DimensionError { kernel: "cg (x0)", expected: n, found: x0.len() }.into());
    }
    if let Some(xs) = x_star {
        if xs.len() != n {
            return Err(DimensionError { kernel: "cg (x*)", expected: n, found: xs.len() }.into());
        }
    }

    let start = Instant::now();
    let mut sampling = Duration::ZERO;
    let mut t = KernelTimes::default();
    let every_op = cfg.normalization == Normalization::EveryVectorOp;
    let after_axpy = cfg.normalization != Normalization::None;
    let limit = cfg.iteration_limit(n);
    let mut history = Vec::new();

    let b_norm = timed(&mut t.norm, || norm2_fp64::<Fp64>(exec, b));

    // line 1: r = b - A x0
    let mut r = MultiwordVector::<A>::zeros(n);
    timed(&mut t.spmv, || spmv::<A>(exec, m, &x0, &mut r))?;
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = A::sub(A::from_f64(bi), *ri);
    }
    if every_op {
        timed(&mut t.normalize, || normalize_vector::<A>(exec, &mut r));
    }
    let rho = timed(&mut t.dot, || dot::<A>(exec, &r, &r))?;
    let mut s = SolverState::<A> {
        x: x0,
        p: r.clone(),
        r,
        q: MultiwordVector::zeros(n),
        rho,
        alpha: A::zero(),
        beta: A::zero(),
        iteration: 0,
    };

    let mut res = relative(timed(&mut t.norm, || norm2_fp64::<A>(exec, &s.r)), b_norm);
    let mut sample = |s: &SolverState<A>, history: &mut Vec<ConvergenceRecord>| -> Result<(), CgError> {
        let t0 = Instant::now();
        history.push(record_metrics::<A>(exec, s, m, b, b_norm, x_star)?);
        sampling += t0.elapsed();
        Ok(())
    };
    if cfg.history_stride > 0 {
        sample(&s, &mut history)?;
    }

    let termination = if res < cfg.epsilon || b_norm == 0.0 {
        Termination::Converged
    } else {
        loop {
            s.iteration += 1;
            timed(&mut t.spmv, || spmv::<A>(exec, m, &s.p, &mut s.q))?;
            if every_op {
                timed(&mut t.normalize, || normalize_vector::<A>(exec, &mut s.q));
            }
            let pq = timed(&mut t.dot, || dot::<A>(exec, &s.p, &s.q))?;
            let pq_view = A::collapse(pq);
            if pq_view == 0.0 || pq_view.is_nan() {
                if cfg.history_stride > 0 {
                    sample(&s, &mut history)?;
                }
                break Termination::Breakdown;
            }
            s.alpha = timed(&mut t.scalar, || A::div(s.rho, pq));
            timed(&mut t.axpy, || axpy::<A>(exec, s.alpha, &s.p, &mut s.x))?;
            if every_op {
                timed(&mut t.normalize, || normalize_vector::<A>(exec, &mut s.x));
            }
            timed(&mut t.axpy, || axpy::<A>(exec, A::neg(s.alpha), &s.q, &mut s.r))?;
            if after_axpy {
                timed(&mut t.normalize, || normalize_vector::<A>(exec, &mut s.r));
            }
            let rho_next = timed(&mut t.dot, || dot::<A>(exec, &s.r, &s.r))?;
            res = relative(timed(&mut t.norm, || norm2_fp64::<A>(exec, &s.r)), b_norm);

            let converged = res < cfg.epsilon;
            let done = converged || res.is_nan() || s.iteration >= limit;
            if cfg.history_stride > 0 && (s.iteration.is_multiple_of(cfg.history_stride) || done) {
                sample(&s, &mut history)?;
            }
            if converged {
                break Termination::Converged;
            }
            if res.is_nan() {
                break Termination::Breakdown;
            }
            if s.iteration >= limit {
                break Termination::MaxIterations;
            }

            s.beta = timed(&mut t.scalar, || A::div(rho_next, s.rho));
            s.rho = rho_next;
            timed(&mut t.scal_then_add, || scal_then_add::<A>(exec, s.beta, &mut s.p, &s.r))?;
            if every_op {
                timed(&mut t.normalize, || normalize_vector::<A>(exec, &mut s.p));
            }
        }
    };
    let elapsed = start.elapsed().saturating_sub(sampling);

    let final_record = match history.last() {
        Some(rec) if rec.iteration == s.iteration => *rec,
        _ => record_metrics::<A>(exec, &s, m, b, b_norm, x_star)?,
    };
    Ok(SolverResult {
        mode: A::MODE,
        termination,
        iterations: s.iteration,
        final_recurrence_residual: res,
        elapsed,
        kernel_times: t,
        history,
        solution: s.x.to_tw(),
        final_true_residual: final_record.true_residual,
        final_error_norm: final_record.error_norm,
    })
}
