//! `mwcg`: run multi-word CG solves and kernel benchmarks, verify the
//! arithmetic against the exact oracle, and emit exactly solvable systems.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 verification
//! failure.

mod bench;
mod input;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multiword_cg::sparse::Synthetic;
use multiword_cg::Mode;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "mwcg", version, about = "Multi-word FP64 arithmetic and CG harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve generated systems with CG in one or more arithmetics.
    Solve(solve::SolveArgs),
    /// Time SpMV or DOT per arithmetic and report a GB/s estimate.
    Bench(bench::BenchArgs),
    /// Run the oracle self-check suites.
    Verify(verify::VerifyArgs),
    /// Write the exactly solvable system built from a matrix.
    Generate(GenerateArgs),
}

/// Where the matrix comes from.
#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct InputArgs {
    /// Matrix Market file (symmetric files are expanded to general form).
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,
    /// Synthetic matrix, e.g. `laplacian2d:64` or
    /// `scaled-laplacian2d:8:8:7`.
    #[arg(long, value_name = "SPEC")]
    pub synthetic: Option<Synthetic>,
}

/// Options shared by `solve` and `bench`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Arithmetic to run; repeatable. Defaults to all five.
    #[arg(long = "mode", value_name = "MODE")]
    pub modes: Vec<Mode>,
    /// Kernel threads; also the reduction partition count.
    #[arg(long, env = "MW_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// Repetitions; the best time is reported.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Summary CSV output.
    #[arg(long, value_name = "PATH")]
    pub out_summary: Option<PathBuf>,
    /// JSON output: the summary rows plus the configuration.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

impl RunArgs {
    pub fn modes(&self) -> Vec<Mode> {
        if self.modes.is_empty() {
            Mode::ALL.to_vec()
        } else {
            self.modes.clone()
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_name = "PATH")]
    out_matrix: PathBuf,
    #[arg(long, value_name = "PATH")]
    out_rhs: PathBuf,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Verification(m) => m,
        }
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

pub fn output_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// Writes a CSV with a fixed header, also when there are no rows.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> CmdResult {
    let err = |e: csv::Error| output_err(path, e);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| output_err(path, e))
}

fn generate(args: GenerateArgs) -> CmdResult {
    let problem = input::load(&args.input)?;
    problem.generated.write_files(&args.out_matrix, &args.out_rhs).map_err(|e| output_err(&args.out_matrix, e))?;
    println!(
        "{}: n = {}, nnz = {}, perturbation {:.3e}",
        problem.name,
        problem.generated.matrix.n_rows(),
        problem.generated.matrix.nnz(),
        problem.generated.perturbation_norm
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
