#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::Cli;

/// Exit status for a malformed invocation or config.
const EXIT_USAGE: u8 = 64;
/// Exit status when a hypothesis of the claimed result fails.
const EXIT_OUT_OF_REGIME: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] rsl_core::Error),
}

/// How a completed run relates to its claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    OutOfRegime,
    Inconsistent,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("RSL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("RSL_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|_| commands::run(cli.command));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::OutOfRegime) => {
            eprintln!("rsl: out of regime: a hypothesis of the claimed result fails (see report)");
            ExitCode::from(EXIT_OUT_OF_REGIME)
        }
        Ok(Outcome::Inconsistent) => {
            eprintln!("rsl: verdict inconsistent: in-regime run disagrees with the prediction (see report)");
            ExitCode::FAILURE
        }
        Err(CliError::Core(e @ (rsl_core::Error::InvalidInput(_) | rsl_core::Error::DimensionMismatch { .. }))) => {
            eprintln!("rsl: usage: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("rsl: usage: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("rsl: error: {e}");
            ExitCode::FAILURE
        }
    }
}
