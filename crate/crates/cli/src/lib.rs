//! Command implementations behind the `cds-replica` binary.
//!
//! Each command turns a [`MarketConfig`] into a serializable report; `main`
//! only parses arguments, prints and maps errors to exit codes.

pub mod config;
pub mod report;

use cds_replica::Error as LibError;
use thiserror::Error;

pub use config::{Market, MarketConfig};
pub use report::{
    cmd_calibrate, cmd_implied_repo, cmd_price, cmd_replicate, CalibrationReport, Display,
    ImpliedRepoReport, PriceReport, ReplicateOptions, ReplicateReport,
};

/// Exit codes of the binary.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const REPLICATION: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("invalid config JSON: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("{0}")]
    Missing(&'static str),
    #[error(transparent)]
    Library(#[from] LibError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(LibError::QuoteUnattainable { .. } | LibError::NoConvergence(_)) => {
                exit::NUMERICAL
            }
            _ => exit::VALIDATION,
        }
    }
}
