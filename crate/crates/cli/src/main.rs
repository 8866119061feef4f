use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use walksearch_cli::{run, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<CliError>() {
            Some(c) => {
                eprintln!("{}", c.to_json());
                ExitCode::from(c.exit_code() as u8)
            }
            None => {
                eprintln!(
                    "{}",
                    serde_json::json!({"error": "internal", "message": format!("{e:#}"), "exit_code": 3})
                );
                ExitCode::from(3)
            }
        },
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::from_cli(&cli)?;
    let dir = cfg.output.clone();
    let written = run(cfg)?;
    let manifest = written.last().context("run wrote no manifest")?;
    println!(
        "wrote {} files to {} ({manifest})",
        written.len(),
        dir.display()
    );
    Ok(())
}
