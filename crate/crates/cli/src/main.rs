mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

/// Applies `URB_THREADS` to the global worker pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("URB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Input(format!(
            "URB_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(format!("cannot start worker pool: {e}")))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Bounds(a) => commands::bounds::run(a),
        Command::Solve(a) => commands::solve::run(a),
        Command::Verify(a) => commands::verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("urb: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
