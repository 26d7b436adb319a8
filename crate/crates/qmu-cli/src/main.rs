//! Command-line front end for the qmu library.
//!
//! `eval` computes one function value, `check` runs identity checks from
//! the registry, `list` prints the registry, `sweep` tabulates a function
//! along a real parameter range, and `report` summarizes check reports
//! written earlier.
//!
//! Exit codes are part of the interface: 0 success, 2 usage error (bad
//! flags, unknown names, malformed numbers), 3 evaluation error (pole
//! guard, divergence, non-convergence), 4 check failure.

mod check;
mod complex_arg;
mod eval;
mod out;
mod sweep;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qmu",
    version,
    about = "q-series special functions: evaluation and identity checking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a function at a point
    Eval(eval::EvalArgs),
    /// Run one identity check, or the full registry with --all
    Check(check::CheckArgs),
    /// List the registered identity checks
    List(check::ListArgs),
    /// Evaluate a function along a real parameter range and emit a table
    Sweep(sweep::SweepArgs),
    /// Summarize report files written by `check --format json --output`
    Report(check::ReportArgs),
}

/// Failure carrying the process exit code mandated by the interface.
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    /// Maps a library error onto the exit-code contract: unknown names and
    /// invalid configuration are usage errors, everything else happened
    /// while evaluating.
    fn eval(err: qmu::QError) -> Self {
        let code = match err {
            qmu::QError::UnknownCheck(_)
            | qmu::QError::InvalidNome { .. }
            | qmu::QError::InvalidContext(_) => 2,
            _ => 3,
        };
        CliError { code, message: err.to_string() }
    }

    fn check_failure(message: impl Into<String>) -> Self {
        CliError { code: 4, message: message.into() }
    }

    fn io(err: std::io::Error) -> Self {
        // A reader that stops early (`qmu list | head`) is not a failure.
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError { code: 0, message: String::new() };
        }
        CliError { code: 2, message: format!("i/o: {err}") }
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => eval::run(args),
        Command::Check(args) => check::run(args),
        Command::List(args) => check::run_list(args),
        Command::Sweep(args) => sweep::run(args),
        Command::Report(args) => check::run_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
