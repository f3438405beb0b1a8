use clap::Args;
use multiword_cg::verify::{run_suite, Implementations, VerifyOptions, SUITES};

use crate::{CmdResult, Failure};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite to run; repeatable. Defaults to all.
    #[arg(long = "suite", value_name = "NAME", value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    suites: Vec<String>,
    /// Smaller sample counts for a fast smoke run.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: VerifyArgs) -> CmdResult {
    let mut opts = if args.quick { VerifyOptions::quick() } else { VerifyOptions::default() };
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    let names: Vec<&str> =
        if args.suites.is_empty() { SUITES.to_vec() } else { args.suites.iter().map(String::as_str).collect() };
    let imp = Implementations::default();
    let mut failed = Vec::new();
    for name in names {
        let report = run_suite(name, &opts, &imp).expect("suite names are validated by clap");
        println!("{} {}", if report.passed { "PASS" } else { "FAIL" }, report.name);
        for line in &report.details {
            println!("    {line}");
        }
        if !report.passed {
            failed.push(report.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failed suites: {}", failed.join(", "))))
    }
}
