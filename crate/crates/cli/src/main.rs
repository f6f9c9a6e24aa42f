mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run() -> Result<(), CliError> {
    let argv = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            return Err(CliError::Usage(
                e.render()
                    .to_string()
                    .trim_start_matches("error: ")
                    .trim_end()
                    .to_string(),
            ))
        }
    };
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(workers))
            .build_global()
            .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
    }
    commands::run(cli.command)
}
