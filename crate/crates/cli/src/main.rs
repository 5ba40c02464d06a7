//! `gks`: manager setup, registration, authentication, group keys,
//! sponsorship, scenario simulation, benchmarks and attack experiments.
//!
//! Exit codes: 0 success or predicate holds, 1 protocol reject or predicate
//! fails, 2 usage or input error, 3 internal error.

mod args;
mod commands;
mod config;
mod error;
mod files;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};
use config::Config;
use output::Output;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match Config::resolve(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            commands::report_error(&Output::new(cli.global.format.unwrap_or(Format::Human)), &e);
            return ExitCode::from(e.exit_code());
        }
    };
    match commands::run(cli.command, &config) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            commands::report_error(&Output::new(config.format), &e);
            ExitCode::from(e.exit_code())
        }
    }
}
