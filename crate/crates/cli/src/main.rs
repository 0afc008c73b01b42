//! Command-line front end for the YMT workbench.
//!
//! One command per process; every emitted artifact carries the tool version,
//! the command line and the seed, and identical command + seed produces
//! byte-identical output.

mod commands;
mod output;
mod scenario;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage problems exit with 64, per convention for command-line
            // misuse; --help and --version print normally.
            match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    return ExitCode::SUCCESS;
                }
                _ => {}
            }
            let _ = err.print();
            return ExitCode::from(64u8);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                ymt_core::YmtError::Input(_) => 2u8,
                ymt_core::YmtError::Precondition(_)
                | ymt_core::YmtError::Verification(_)
                | ymt_core::YmtError::LogBranch { .. } => 3u8,
            };
            ExitCode::from(code)
        }
    }
}
