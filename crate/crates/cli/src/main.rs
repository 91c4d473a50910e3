//! `icspec` command-line tool.

mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let argv = match config::expand_config(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return fail(&CliError::Usage(format!("cannot start {threads} threads: {e}")));
        }
    }

    log::debug!("running {}", cli.command.name());
    let result = match &cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Band(a) => commands::band(a),
        Command::TestTr(a) => commands::test(a, false),
        Command::TestEq(a) => commands::test(a, true),
        Command::Simulate(a) => commands::simulate(a),
        Command::TruthSurface(a) => commands::truth_surface(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Catalog(a) => commands::catalog(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    e.exit_code()
}
