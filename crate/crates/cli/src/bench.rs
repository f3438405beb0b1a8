//! Kernel timing with a bytes-moved model.
//!
//! SpMV moves the matrix once (8-byte values, 8-byte column indices,
//! `n + 1` 8-byte row pointers), reads `x` once and writes `y` once, each at
//! `8 * words` bytes per element. DOT reads two vectors at `8 * words` bytes
//! per element. Caches and repeated `x` gathers are not modelled.

use std::hint::black_box;
use std::time::Instant;

use clap::{Args, ValueEnum};
use multiword_cg::kernels::{dot, spmv, Arithmetic, MultiwordVector};
use multiword_cg::sparse::CsrMatrix;
use multiword_cg::{with_arithmetic, Exec, Mode};
use serde::Serialize;

use crate::{input, output_err, write_csv, CmdResult, Failure, InputArgs, RunArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Spmv,
    Dot,
}

impl Kernel {
    fn as_str(self) -> &'static str {
        match self {
            Kernel::Spmv => "spmv",
            Kernel::Dot => "dot",
        }
    }

    fn default_reps(self) -> usize {
        match self {
            Kernel::Spmv => 10,
            Kernel::Dot => 100,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value_t = Kernel::Spmv)]
    kernel: Kernel,
    /// DOT vector length (defaults to the matrix dimension).
    #[arg(long)]
    length: Option<usize>,
}

pub const BENCH_HEADER: [&str; 6] = ["mode", "n", "nnz", "seconds_best", "bytes_model", "gbps"];

pub const BYTES_MODEL: &str = "spmv: 16*nnz + 8*(n+1) + 2*8*words*n; dot: 2*8*words*n";

#[derive(Debug, Serialize)]
struct BenchRow {
    mode: &'static str,
    n: usize,
    nnz: usize,
    seconds_best: f64,
    bytes_model: u64,
    gbps: f64,
}

fn bytes_model(kernel: Kernel, mode: Mode, n: usize, nnz: usize) -> u64 {
    let vec = 8 * mode.words() as u64 * n as u64;
    match kernel {
        Kernel::Spmv => 16 * nnz as u64 + 8 * (n as u64 + 1) + 2 * vec,
        Kernel::Dot => 2 * vec,
    }
}

fn ramp<A: Arithmetic>(n: usize) -> MultiwordVector<A> {
    let xs: Vec<f64> = (0..n).map(|i| 1.0 + (i % 101) as f64 / 101.0).collect();
    MultiwordVector::from_f64(&xs)
}

fn best_of(reps: usize, mut f: impl FnMut()) -> f64 {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn time_kernel(exec: &Exec, kernel: Kernel, mode: Mode, m: Option<&CsrMatrix>, n: usize, reps: usize) -> f64 {
    with_arithmetic!(mode, A => {
        let x = ramp::<A>(n);
        match (kernel, m) {
            (Kernel::Spmv, Some(m)) => {
                let mut y = MultiwordVector::<A>::zeros(n);
                best_of(reps, || spmv::<A>(exec, m, black_box(&x), &mut y).expect("square matrix"))
            }
            _ => {
                let y = ramp::<A>(n);
                best_of(reps, || {
                    black_box(dot::<A>(exec, black_box(&x), black_box(&y)).expect("equal lengths"));
                })
            }
        }
    })
}

pub fn run(args: BenchArgs) -> CmdResult {
    let reps = args.run.reps.unwrap_or(args.kernel.default_reps());
    if reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let exec = Exec::new(args.run.threads).map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    let matrix = input::matrix(&args.input)?;
    let (name, m, n) = match (args.kernel, matrix, args.length) {
        (Kernel::Spmv, Some((name, m)), _) => {
            if !m.is_square() {
                return Err(Failure::Input(format!("{name}: SpMV benchmark needs a square matrix")));
            }
            let n = m.n_rows();
            (name, Some(m), n)
        }
        (Kernel::Spmv, None, _) => {
            return Err(Failure::Usage("spmv needs --matrix or --synthetic".into()));
        }
        (Kernel::Dot, _, Some(len)) => (format!("length:{len}"), None, len),
        (Kernel::Dot, Some((name, m)), None) => (name, None, m.n_rows()),
        (Kernel::Dot, None, None) => {
            return Err(Failure::Usage("dot needs --length, --matrix or --synthetic".into()));
        }
    };
    let nnz = m.as_ref().map_or(0, CsrMatrix::nnz);

    let rows: Vec<BenchRow> = args
        .run
        .modes()
        .into_iter()
        .map(|mode| {
            let seconds_best = time_kernel(&exec, args.kernel, mode, m.as_ref(), n, reps);
            let bytes = bytes_model(args.kernel, mode, n, nnz);
            BenchRow {
                mode: mode.as_str(),
                n,
                nnz,
                seconds_best,
                bytes_model: bytes,
                gbps: if seconds_best > 0.0 { bytes as f64 / seconds_best / 1e9 } else { 0.0 },
            }
        })
        .collect();

    println!("{} {name}: n = {n}, nnz = {nnz}, best of {reps}, threads = {}", args.kernel.as_str(), exec.threads());
    println!("{:<5} {:>12} {:>14} {:>9}", "mode", "seconds", "bytes", "GB/s");
    for r in &rows {
        println!("{:<5} {:>12.6e} {:>14} {:>9.3}", r.mode, r.seconds_best, r.bytes_model, r.gbps);
    }

    if let Some(path) = &args.run.out_summary {
        write_csv(path, &BENCH_HEADER, &rows)?;
    }
    if let Some(path) = &args.run.json {
        let doc = serde_json::json!({
            "config": {
                "kernel": args.kernel.as_str(),
                "input": name,
                "n": n,
                "nnz": nnz,
                "reps": reps,
                "threads": exec.threads(),
                "bytes_model": BYTES_MODEL,
            },
            "rows": rows,
        });
        let text = serde_json::to_string_pretty(&doc).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| output_err(path, e))?;
    }
    Ok(())
}
