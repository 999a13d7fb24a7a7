//! `cdindex` command-line tool.
//!
//! Data goes to files or standard output, diagnostics to standard error.
//! Exit codes: 0 success, 2 invalid arguments, 3 bad input data, 4 mismatch,
//! 5 I/O failure.

mod args;
mod commands;
mod config;
mod failure;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::Config;
use failure::Failure;

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Compute(a) => commands::compute(a, &config),
        Command::Stats(a) => commands::stats(a, &config),
        Command::Trend(a) => commands::trend(a, &config),
        Command::Classify(a) => commands::classify(a, &config),
        Command::Compare(a) => commands::compare(a, &config),
        Command::Synth(a) => commands::synth(a, &config),
        Command::Verify(a) => commands::verify(a, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .format_target(false)
        .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            log::error!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
