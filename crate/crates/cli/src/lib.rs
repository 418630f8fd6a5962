//! Command-line front end: simulate records, reconstruct and repair process
//! matrices, compare them, fit Markovian generators and export point clouds.
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 numerical failure.

pub mod cli;
pub mod commands;
pub mod error;
pub mod files;
pub mod format;

use std::ffi::OsString;

use clap::Parser;

pub use error::{CliError, CliResult};

/// Parses `args` (program name first), runs the command, reports errors on
/// standard error and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &parsed.command {
        cli::Command::Simulate(a) => commands::simulate(a),
        cli::Command::Reconstruct(a) => commands::reconstruct_cmd(a),
        cli::Command::Project(a) => commands::project(a),
        cli::Command::Metrics(a) => commands::metrics(a),
        cli::Command::Lindblad(a) => commands::lindblad(a),
        cli::Command::Ellipsoid(a) => commands::ellipsoid(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
