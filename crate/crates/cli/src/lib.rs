//! Suite runner for `twistor-core`: named collections of checks evaluated on
//! seeded random samples, with deterministic JSON or text reports.

pub mod config;
pub mod report;
pub mod rng;
mod suites;
pub mod tolerances;

use thiserror::Error;
use twistor_core::TwistorError;

pub use config::{Format, SuiteConfig};
pub use report::Report;
pub use suites::{list_suites, resolve, run_suite, SuiteInfo};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown suite {0:?} (see `twistor list`)")]
    UnknownSuite(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Evaluation {
        context: String,
        #[source]
        source: TwistorError,
    },
}

impl CliError {
    /// 2 for usage and configuration problems, 3 for evaluation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownSuite(_) | CliError::Config(_) => 2,
            CliError::Evaluation { .. } => 3,
        }
    }
}
