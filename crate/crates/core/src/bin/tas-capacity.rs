use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tas_capacity::experiment::{
    run_experiment, run_validation_suite, ExperimentKind, ExperimentSpec, RunOptions, ValidationOptions,
};
use tas_capacity::{Error, OutageConvention};

/// Monte Carlo and closed-form mutual information under transmit antenna selection.
#[derive(Parser)]
#[command(name = "tas-capacity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Empirical vs Gaussian CDF of the mutual information over several array sizes.
    Cdf(Common),
    /// Ergodic capacity over an SNR and selection-size grid.
    Ergodic(Common),
    /// Outage capacity over receive and selection sizes.
    Outage(Common),
    /// Statistical self-checks; exits with status 2 if any check fails.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment spec; the built-in preset is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Output file. Defaults to the spec's output_path, then a per-kind name.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_convention)]
    outage_convention: Option<OutageConvention>,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_convention(s: &str) -> Result<OutageConvention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_spec(kind: ExperimentKind, args: &Common) -> Result<ExperimentSpec, Error> {
    let mut spec = match &args.config {
        Some(path) => {
            let spec = ExperimentSpec::from_json(&fs::read_to_string(path)?)?;
            if spec.kind != kind {
                return Err(Error::Spec(format!(
                    "config describes a {:?} run, not {:?}",
                    spec.kind, kind
                )));
            }
            spec
        }
        None => ExperimentSpec::preset(kind),
    };
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = Some(trials);
    }
    if let Some(conv) = args.outage_convention {
        spec.outage_convention = Some(conv);
    }
    if let Some(out) = &args.out {
        spec.output_path = Some(out.to_string_lossy().into_owned());
    }
    Ok(spec)
}

fn run(kind: ExperimentKind, args: &Common) -> Result<bool, Error> {
    let spec = load_spec(kind, args)?;
    spec.check()?;
    let options = RunOptions { threads: args.threads };
    let out = PathBuf::from(spec.output_path.clone().unwrap_or_else(|| kind.default_output().to_owned()));
    eprintln!("running {kind:?} with {} trials per point", spec.trials());
    let start = Instant::now();
    let (artifacts, passed) = if kind == ExperimentKind::Validate {
        let (report, artifacts) = run_validation_suite(&spec, options, ValidationOptions::default())?;
        for check in &report.checks {
            eprintln!("  {:<28} {}", check.name, if check.passed { "pass" } else { "FAIL" });
        }
        (artifacts, report.all_passed)
    } else {
        (run_experiment(&spec, options)?, true)
    };
    let written = artifacts.write(&out)?;
    eprintln!("done in {:.1}s", start.elapsed().as_secs_f64());
    for path in written {
        println!("{}", path.display());
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Cdf(a) => (ExperimentKind::CdfCompare, a),
        Command::Ergodic(a) => (ExperimentKind::ErgodicSweep, a),
        Command::Outage(a) => (ExperimentKind::OutageSweep, a),
        Command::Validate(a) => (ExperimentKind::Validate, a),
    };
    match run(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
