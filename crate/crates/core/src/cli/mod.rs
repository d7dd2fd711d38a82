//! Command-line front end: one subcommand per experiment, a versioned JSON
//! summary for every run and CSV tables for the tabular ones.

mod args;
mod commands;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command, Common};
pub use output::{num, Summary, Table, SCHEMA};

use crate::error::{Error, Result};
use output::Sink;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical_precondition() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

fn common_mut(cmd: &mut Command) -> &mut Common {
    match cmd {
        Command::Resonance(a) => &mut a.common,
        Command::Solve(a) => &mut a.common,
        Command::TpAssemble(a) => &mut a.common,
        Command::Counterexample(a) => &mut a.common,
        Command::Sweep(a) => &mut a.common,
        Command::Embedding(a) => &mut a.common,
        Command::Report(a) => &mut a.common,
    }
}

/// Run a parsed command; the summary is also written to `<out>/<command>.json`.
pub fn run(cli: Cli) -> Result<Summary> {
    let mut cmd = cli.command;
    let common = common_mut(&mut cmd);
    *common = commands::load_config(std::mem::take(common))?;
    let sink = Sink::new(commands::output_dir(common))?;
    match cmd {
        Command::Resonance(a) => commands::resonance(a, &sink),
        Command::Solve(a) => commands::solve(a, &sink),
        Command::TpAssemble(a) => commands::tp_assemble(a, &sink),
        Command::Counterexample(a) => commands::counterexample(a, &sink),
        Command::Sweep(a) => commands::sweep(a, &sink),
        Command::Embedding(a) => commands::embedding(a, &sink),
        Command::Report(a) => commands::report(a, &sink),
    }
}

/// Parse, run, print the summary to stdout and return the exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(cli).and_then(|s| s.to_json()) {
        Ok(json) => {
            print!("{json}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}
