//! Experiment runner behind the `szego-lab` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod format;
pub mod manifest;
pub mod run;

use thiserror::Error;

pub use config::Config;
pub use manifest::{Clause, Manifest, Status};
pub use run::{run_config, RunOptions};

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration and input errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures and failed tolerance clauses.
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_TOLERANCE,
        }
    }
}

impl From<szego_core::Error> for CliError {
    fn from(e: szego_core::Error) -> Self {
        match e {
            szego_core::Error::InvalidParameter { .. } | szego_core::Error::Parse { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
