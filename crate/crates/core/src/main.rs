use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use subgraph_lg::cli::{execute, Cli, CliError};

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match execute(&cli) {
        Ok(text) => {
            stdout.write_all(text.as_bytes()).context("writing report")?;
            Ok(ExitCode::SUCCESS)
        }
        Err(CliError::Verification(report)) => {
            stdout.write_all(report.as_bytes()).context("writing report")?;
            writeln!(stdout).ok();
            eprintln!("verification failed");
            Ok(ExitCode::from(4))
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(e.exit_code() as u8))
        }
    }
}
