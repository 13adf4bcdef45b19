use std::process::ExitCode;

use clap::Parser;
use dea_path_cli::{run, Args, CliError, RunConfig, SEED_ENV};

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = RunConfig::from_args(args, std::env::var(SEED_ENV).ok()).and_then(|config| {
        let summary = run(&config)?;
        for file in &summary.files {
            println!("{}", file.display());
        }
        if summary.failed_units > 0 {
            return Err(CliError::UnitFailures {
                failed: summary.failed_units,
            });
        }
        Ok(())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dea-path: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
