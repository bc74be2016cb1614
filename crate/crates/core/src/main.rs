use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hull_lab::harness::{
    run_averaging, run_converge, run_hull, run_obstruction, run_selftest, ExperimentConfig, HarnessError, RunOutcome,
};

/// Experiments on polynomial hulls, Poletsky discs and Green currents in C².
#[derive(Debug, Parser)]
#[command(name = "hull-lab", version)]
struct Cli {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: the config's out_dir, else ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Multiplies every quadrature and sampling size.
    #[arg(long = "grid-scale", global = true, value_name = "F", allow_negative_numbers = true)]
    grid_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weak convergence of pushforward Green currents and Poletsky checks.
    Converge,
    /// Polynomial certificate for a point outside the hull.
    Hull,
    /// Moments of pushforwards under ζ ↦ ζ^ν.
    Averaging,
    /// Winding histogram of random curves near K1.
    Obstruction,
    /// Invariant checks at modest sizes.
    Selftest,
}

fn run(cli: &Cli) -> Result<RunOutcome, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(f) = cli.grid_scale {
        cfg.grid_scale = f;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Converge => run_converge(&cfg, &out),
        Command::Hull => run_hull(&cfg, &out),
        Command::Averaging => run_averaging(&cfg, &out),
        Command::Obstruction => run_obstruction(&cfg, &out),
        Command::Selftest => run_selftest(&cfg, &out),
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1: code 2 is reserved for verification failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            for line in &outcome.summary {
                let _ = writeln!(stdout, "{line}");
            }
            for f in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hull-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
