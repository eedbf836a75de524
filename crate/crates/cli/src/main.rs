//! Batch driver: read a JSON model file, run the solvers and the
//! verification oracles, emit tables.
//!
//! Data goes to standard output (or `--out`); diagnostics go to standard
//! error. Failures print one line `ERROR <code>: <reason>` and exit with
//! the code: 1 for model validation, 2 for non-convergence, 3 for a
//! verification check outside tolerance, 4 for I/O or parse problems.

mod commands;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use scalefn_core::Error;

#[derive(Debug, Parser)]
#[command(
    name = "scalefn",
    version,
    about = "Scale functions of spectrally negative Levy processes with matrix-exponential jumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Standardize the jump law and print its matrix-exponential triple.
    Repr(CommonArgs),
    /// Solve the first-passage fixed point and print its data.
    Psi(CommonArgs),
    /// Tabulate W, W', its integral and the hitting probability as CSV.
    Scale(CommonArgs),
    /// Cross-check the solver against transform inversion and Monte Carlo.
    Verify(CommonArgs),
    /// Monte Carlo hitting-probability estimates over the grid.
    Simulate(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON model description.
    #[arg(long)]
    model: PathBuf,

    /// Write data here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the fixed-point tolerance from the model file.
    #[arg(long)]
    tol: Option<f64>,

    /// Override the fixed-point iteration budget.
    #[arg(long)]
    max_iter: Option<usize>,

    /// Override the Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the Monte Carlo path count.
    #[arg(long)]
    paths: Option<usize>,

    /// Suppress diagnostics on standard error.
    #[arg(long)]
    quiet: bool,
}

/// Terminal failure carrying its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } | Error::Numerical(_) | Error::Singular(_) => 2,
            _ => 1,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(4, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let text = err.to_string();
            let reason = text.lines().next().unwrap_or("bad arguments");
            eprintln!("ERROR 4: {reason}");
            return ExitCode::from(4);
        }
    };
    let result = match &cli.command {
        Command::Repr(args) => commands::repr(args),
        Command::Psi(args) => commands::psi(args),
        Command::Scale(args) => commands::scale(args),
        Command::Verify(args) => commands::verify(args),
        Command::Simulate(args) => commands::simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ERROR {}: {}", f.code, f.message);
            ExitCode::from(f.code)
        }
    }
}
