//! Command-line front end for the beam-adaptation simulator: capacity and
//! BER curve generation, named figure presets, system comparisons, and a
//! deterministic self-test, all writing CSV or JSON with the resolved
//! configuration embedded.

pub mod args;
pub mod config;
pub mod output;
pub mod presets;
pub mod runner;
pub mod selftest;

pub use args::Cli;

use beamsim_core::Error;

/// Parses the process arguments, runs the selected command, and returns the
/// exit code: 0 success, 1 invalid input, 2 numerical failure, 3 failed
/// self-test.
pub fn execute_from_env() -> i32 {
    let cli = match <Cli as clap::Parser>::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout and exit 0; real parse
            // errors print to stderr and exit 1.
            let code = if err.use_stderr() { runner::EXIT_INVALID } else { runner::EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match runner::run(cli) {
        Ok(code) => code,
        Err(Error::InvalidInput(msg)) => {
            eprintln!("error: {msg}");
            runner::EXIT_INVALID
        }
        Err(Error::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            runner::EXIT_NUMERICAL
        }
    }
}
