//! Command implementations behind the `hammersley` binary.
//!
//! Exit codes: 0 on success, 1 for usage, I/O and malformed-input errors,
//! 2 when `verify` finds a disagreement.

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod config;
pub mod fit;
pub mod report;
pub mod results;
pub mod simulate;
pub mod verify;

pub use config::{ExperimentConfig, ProcessSpec};
pub use fit::{cmd_fit, FitOptions};
pub use report::{report, ReportOptions};
pub use results::{CheckpointRow, Column, ResultsFile, ResultsMeta};
pub use simulate::{cmd_simulate, merge, simulate};
pub use verify::{verify, VerifyOptions, VerifyOutcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed results file: {0}")]
    Format(String),
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
    #[error("fit failed: {0}")]
    Fit(#[from] crate::fitkit::FitError),
    #[error("verification failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            _ => 1,
        }
    }
}
