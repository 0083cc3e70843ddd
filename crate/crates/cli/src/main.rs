//! `njk`: exact checks and cohomology for Nijenhuis Lie algebras and algebroids.

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use njk_cli::error::{EXIT_ERROR, EXIT_PARSE};
use njk_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    match execute(&config) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("njk: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn execute(config: &RunConfig) -> anyhow::Result<u8> {
    match run(config) {
        Ok(report) => {
            if !config.quiet {
                std::io::stdout().write_all(report.render(config.format).as_bytes()).context("writing the report")?;
            }
            Ok(report.exit_code())
        }
        Err(e) => {
            eprintln!("njk: {e}");
            Ok(e.exit_code())
        }
    }
}
