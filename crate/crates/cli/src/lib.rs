//! Command-line front end for the `qclock` simulator.
//!
//! Time series are written as CSV (or JSON tables), reports as JSON. Every
//! command is deterministic given its settings and seed.

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

pub use args::{Cli, Command, CommandKind};

/// Environment variable consulted for the seed when none is given.
pub const SEED_ENV: &str = "QCLOCK_SEED";
pub const DEFAULT_SEED: u64 = 20_240_229;

/// Exit code for a run whose report was written but failed its tolerance check.
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] qclock::Error),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

/// A finished command: the document and where it goes.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub content: String,
    pub out: Option<PathBuf>,
    pub status: Status,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => EXIT_TOLERANCE,
        }
    }

    /// Writes the document to `out`, or to stdout.
    pub fn write(&self) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, &self.content).map_err(|e| CliError::Io {
                path: path.clone(),
                message: e.to_string(),
            }),
            None => std::io::stdout()
                .write_all(self.content.as_bytes())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                }),
        }
    }
}

/// Layers preset, config file and flags, validates, and runs the command.
pub fn run(command: &Command, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let a = command.args();
    let file = a
        .config
        .as_deref()
        .map(config::read_config_file)
        .transpose()?;
    let settings = config::layer(command.kind(), file, config::Overrides::from_args(a))?;
    commands::execute(command.kind(), &settings, env_seed)
}

/// Parses an argument vector (program name first) and runs it.
pub fn run_from<I, T>(argv: I, env_seed: Option<&str>) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli.command, env_seed)
}
