//! Batch runner for critlab experiments: config parsing, task dispatch,
//! report and CSV output, and parameter sweeps.

pub mod config;
pub mod runner;
pub mod tasks;

use thiserror::Error;

pub use config::{ExperimentConfig, ParseError, TaskKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {0}")]
    Config(#[from] ParseError),

    #[error(transparent)]
    Core(#[from] critlab::Error),

    #[error("{0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e {
                critlab::Error::InvalidConfiguration(_) | critlab::Error::UnknownDescriptor(_) => EXIT_CONFIG,
                critlab::Error::NumericFailure(_) => EXIT_NUMERIC,
                critlab::Error::Io { .. } => EXIT_IO,
                _ => EXIT_PRECONDITION,
            },
        }
    }
}
