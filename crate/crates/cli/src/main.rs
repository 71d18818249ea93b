mod args;
mod commands;
mod config;
mod data;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::ConfigFile;

/// Anything that ends a command early. Usage and I/O problems exit with 2,
/// statistical or numerical failures with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io { path: String, message: String },
    Core(logvol::Error),
    Statistical(String),
}

impl Failure {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure::Io { path: path.display().to_string(), message: e.to_string() }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io { .. } => 2,
            Failure::Core(e) if e.is_usage() => 2,
            Failure::Core(_) | Failure::Statistical(_) => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Io { path, message } => ("io", format!("{path}: {message}")),
            Failure::Core(e) => (e.kind(), e.to_string()),
            Failure::Statistical(m) => ("statistical", m.clone()),
        };
        serde_json::json!({ "error": { "kind": kind, "message": message } })
    }
}

impl From<logvol::Error> for Failure {
    fn from(e: logvol::Error) -> Self {
        Failure::Core(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Fit(a) => commands::fit(a, &file),
        Command::Test(a) => commands::test(a, &file),
        Command::Montecarlo(a) => commands::montecarlo(a, &file),
        Command::ForecastEval(a) => commands::forecast_eval(a, &file),
        Command::Nic(a) => commands::nic(a),
        Command::Simulate(a) => commands::simulate(a, &file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f.to_json()).expect("error JSON"));
            ExitCode::from(f.exit_code())
        }
    }
}
