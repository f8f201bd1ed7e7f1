//! Batch front end: validate instances, separate cuts at a point, solve
//! with or without the strong inequalities, run the exact verification
//! batteries, and export models as MPS.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

mod commands;
mod mps;
mod report;

use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match commands::dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{}", commands::USAGE);
            ExitCode::from(2)
        }
        Err(commands::CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
