use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use multiword_cg::cg::{cg_solve, SolverConfig, SolverResult};
use multiword_cg::{Exec, Mode, Normalization};
use serde::Serialize;

use crate::input::{self, Problem};
use crate::{output_err, write_csv, CmdResult, Failure, InputArgs, RunArgs};

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Relative residual tolerance; repeatable.
    #[arg(long = "eps", value_name = "FLOAT", default_values_t = [1e-16])]
    epsilons: Vec<f64>,
    /// Vector renormalization for quasi modes: after-axpy, none or every-op.
    #[arg(long = "normalize", value_name = "WHEN", default_value_t = Normalization::AfterResidualAxpy)]
    normalization: Normalization,
    /// Record the TW-accurate history every N iterations (0 disables).
    #[arg(long, default_value_t = SolverConfig::DEFAULT_HISTORY_STRIDE)]
    stride: usize,
    /// History CSV output.
    #[arg(long, value_name = "PATH")]
    out_history: Option<PathBuf>,
    /// Iteration limit (default 10 n).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Report all times as zero so outputs are reproducible byte for byte.
    #[arg(long)]
    no_timings: bool,
}

pub const SUMMARY_HEADER: [&str; 15] = [
    "problem",
    "n",
    "nnz",
    "mode",
    "eps",
    "normalization",
    "threads",
    "termination",
    "converged",
    "iterations",
    "seconds",
    "recurrence_residual",
    "true_residual",
    "error_norm",
    "best",
];

pub const HISTORY_HEADER: [&str; 6] =
    ["mode", "eps", "iteration", "recurrence_residual", "true_residual", "error_norm"];

#[derive(Debug, Serialize)]
struct SummaryRow {
    problem: String,
    n: usize,
    nnz: usize,
    mode: &'static str,
    eps: f64,
    normalization: &'static str,
    threads: usize,
    termination: &'static str,
    converged: bool,
    iterations: usize,
    seconds: f64,
    recurrence_residual: f64,
    true_residual: f64,
    error_norm: Option<f64>,
    best: bool,
}

#[derive(Debug, Serialize)]
struct HistoryRow {
    mode: &'static str,
    eps: f64,
    iteration: usize,
    recurrence_residual: f64,
    true_residual: f64,
    error_norm: Option<f64>,
}

#[derive(Debug, Serialize)]
struct JsonRun {
    #[serde(flatten)]
    summary: SummaryRow,
    kernel_seconds: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Serialize)]
struct JsonConfig<'a> {
    problem: &'a str,
    n: usize,
    nnz: usize,
    perturbation_norm: f64,
    modes: Vec<&'static str>,
    epsilons: &'a [f64],
    normalization: &'static str,
    threads: usize,
    reps: usize,
    stride: usize,
    max_iterations: Option<usize>,
    timings: bool,
}

struct Run {
    eps: f64,
    result: SolverResult,
    seconds: f64,
}

fn solve_best_of(exec: &Exec, p: &Problem, cfg: &SolverConfig, reps: usize) -> Result<(SolverResult, f64), Failure> {
    let g = &p.generated;
    let mut best: Option<(SolverResult, f64)> = None;
    for _ in 0..reps {
        let r = cg_solve(exec, &g.matrix, &g.rhs, None, cfg, Some(&g.x_star))
            .map_err(|e| Failure::Input(format!("{}: {e}", p.name)))?;
        let t = r.elapsed.as_secs_f64();
        best = Some(match best {
            Some((first, b)) => (first, b.min(t)),
            None => (r, t),
        });
    }
    Ok(best.expect("reps >= 1"))
}

/// Index of the best converged run per epsilon: fastest, then most
/// accurate, then first listed.
fn best_flags(runs: &[Run]) -> Vec<bool> {
    let mut flags = vec![false; runs.len()];
    let key = |r: &Run| (r.seconds, r.result.final_error_norm.unwrap_or(f64::INFINITY));
    for (i, r) in runs.iter().enumerate() {
        if !r.result.converged() {
            continue;
        }
        let beaten = runs.iter().enumerate().any(|(j, o)| {
            j != i && o.eps == r.eps && o.result.converged() && {
                let (a, b) = (key(o), key(r));
                a < b || (a == b && j < i)
            }
        });
        flags[i] = !beaten;
    }
    flags
}

pub fn run(args: SolveArgs) -> CmdResult {
    let reps = args.run.reps.unwrap_or(1);
    if reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    if args.max_iters == Some(0) {
        return Err(Failure::Usage("--max-iters must be at least 1".into()));
    }
    if let Some(e) = args.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Failure::Usage(format!("--eps must be positive and finite, got {e}")));
    }
    let exec = Exec::new(args.run.threads).map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    let modes = args.run.modes();
    let problem = input::load(&args.input)?;
    let m = &problem.generated.matrix;

    let mut runs = Vec::new();
    for &eps in &args.epsilons {
        for &mode in &modes {
            let mut cfg =
                SolverConfig::new(mode, eps).with_normalization(args.normalization).with_history_stride(args.stride);
            if let Some(k) = args.max_iters {
                cfg = cfg.with_max_iterations(k);
            }
            let (result, seconds) = solve_best_of(&exec, &problem, &cfg, reps)?;
            let seconds = if args.no_timings { 0.0 } else { seconds };
            runs.push(Run { eps, result, seconds });
        }
    }

    let best = best_flags(&runs);
    let summary: Vec<SummaryRow> = runs
        .iter()
        .zip(&best)
        .map(|(r, &best)| SummaryRow {
            problem: problem.name.clone(),
            n: m.n_rows(),
            nnz: m.nnz(),
            mode: r.result.mode.as_str(),
            eps: r.eps,
            normalization: args.normalization.as_str(),
            threads: exec.threads(),
            termination: r.result.termination.as_str(),
            converged: r.result.converged(),
            iterations: r.result.iterations,
            seconds: r.seconds,
            recurrence_residual: r.result.final_recurrence_residual,
            true_residual: r.result.final_true_residual,
            error_norm: r.result.final_error_norm,
            best,
        })
        .collect();

    println!(
        "{}: n = {}, nnz = {}, perturbation {:.3e}, threads = {}",
        problem.name,
        m.n_rows(),
        m.nnz(),
        problem.generated.perturbation_norm,
        exec.threads()
    );
    println!(
        "{:<5} {:>8} {:>15} {:>9} {:>10} {:>11} {:>11} {:>11}",
        "mode", "eps", "termination", "iters", "seconds", "rec_resid", "true_resid", "error"
    );
    for s in &summary {
        println!(
            "{:<5} {:>8.0e} {:>15} {:>9} {:>10.4} {:>11.3e} {:>11.3e} {:>11.3e}{}",
            s.mode,
            s.eps,
            s.termination,
            s.iterations,
            s.seconds,
            s.recurrence_residual,
            s.true_residual,
            s.error_norm.unwrap_or(f64::NAN),
            if s.best { "  *best" } else { "" }
        );
    }

    if let Some(path) = &args.run.out_summary {
        write_csv(path, &SUMMARY_HEADER, &summary)?;
    }
    if let Some(path) = &args.out_history {
        let rows: Vec<HistoryRow> = runs
            .iter()
            .flat_map(|r| {
                r.result.history.iter().map(move |h| HistoryRow {
                    mode: r.result.mode.as_str(),
                    eps: r.eps,
                    iteration: h.iteration,
                    recurrence_residual: h.recurrence_residual,
                    true_residual: h.true_residual,
                    error_norm: h.error_norm,
                })
            })
            .collect();
        write_csv(path, &HISTORY_HEADER, &rows)?;
    }
    if let Some(path) = &args.run.json {
        let config = JsonConfig {
            problem: &problem.name,
            n: m.n_rows(),
            nnz: m.nnz(),
            perturbation_norm: problem.generated.perturbation_norm,
            modes: modes.iter().map(|m: &Mode| m.as_str()).collect(),
            epsilons: &args.epsilons,
            normalization: args.normalization.as_str(),
            threads: exec.threads(),
            reps,
            stride: args.stride,
            max_iterations: args.max_iters,
            timings: !args.no_timings,
        };
        let runs: Vec<JsonRun> = summary
            .into_iter()
            .zip(&runs)
            .map(|(summary, r)| JsonRun {
                summary,
                kernel_seconds: r
                    .result
                    .kernel_times
                    .entries()
                    .iter()
                    .map(|&(k, d)| (k, if args.no_timings { 0.0 } else { d.as_secs_f64() }))
                    .collect(),
            })
            .collect();
        let doc = serde_json::json!({ "config": config, "runs": runs });
        let text = serde_json::to_string_pretty(&doc).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| output_err(path, e))?;
    }
    Ok(())
}
