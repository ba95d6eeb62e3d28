mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use mlpractice_service::ServiceConfig;

use args::{Cli, Command};

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = ServiceConfig::load_from_process(cli.config.as_deref())?;
    let mut out = std::io::stdout().lock();
    match &cli.command {
        Command::Ingest(a) => commands::ingest(a, &config, &mut out),
        Command::Index(a) => commands::index(a, &config, cli.seed, &mut out),
        Command::Search(a) => commands::search(a, &config, cli.seed, &mut out),
        Command::Evaluate(a) => commands::evaluate(a, cli.seed, &mut out),
        Command::Serve(a) => commands::serve(a, config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
