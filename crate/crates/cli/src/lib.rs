//! Experiment driver behind the `ssa` binary.
//!
//! Each subcommand resolves an [`ExperimentConfig`], runs independent
//! (problem, method) jobs on the rayon pool and collects them in input order,
//! so the CSV bytes depend only on the configuration.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

pub use args::{Cli, Command, RunArgs};
pub use config::{ExperimentConfig, MethodKind, MethodSpec};
pub use output::Output;

/// Failure of a CLI run. `Usage` maps to exit code 2, the rest to 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Run(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Run(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ssa_core::Error> for CliError {
    fn from(e: ssa_core::Error) -> Self {
        match e {
            ssa_core::Error::Argument(m) => CliError::Usage(m),
            ssa_core::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

/// Runs one subcommand and returns its outputs without writing them.
pub fn execute(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    match cfg.command.as_str() {
        "build-basis" => commands::build_basis(cfg),
        "sgmres" => commands::sgmres(cfg),
        "perf-profile" => commands::perf_profile(cfg),
        "bounds-demo" => commands::bounds_demo(cfg),
        "select-demo" => commands::select_demo(cfg),
        other => Err(CliError::usage(format!("unknown command '{other}'"))),
    }
}

/// Resolves the configuration, runs, and writes the CSV files.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = ExperimentConfig::resolve(&cli.command)?;
    let out = execute(&cfg)?;
    out.write(cfg.out.as_deref())
}
