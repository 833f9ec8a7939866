mod args;
mod commands;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::Output;

fn run(cli: Cli) -> Result<Output> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Pmf(a) => commands::pmf(a),
        Command::Sample(a) => commands::sample(a),
        Command::Infer(a) => commands::infer(a),
        Command::Validate(a) => commands::validate(a),
    }
}

fn write(out: &Output) -> Result<()> {
    for (path, text) in &out.extra {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    match &out.path {
        Some(path) => {
            fs::write(path, out.text()).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.text().as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|out| write(&out).map(|()| out.success)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
