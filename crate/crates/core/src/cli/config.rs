use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::planeproc::{Metric, PlaneModel};

/// Which process an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessSpec {
    Multiline { k: usize },
    Plane {
        #[serde(flatten)]
        model: PlaneModel,
    },
}

impl ProcessSpec {
    /// Leading coefficient `2(k - 1)` of the mean for the multiline process.
    pub fn sqrt_coefficient(&self) -> Option<f64> {
        match self {
            ProcessSpec::Multiline { k } => Some(2.0 * (*k as f64 - 1.0)),
            ProcessSpec::Plane { .. } => None,
        }
    }
}

impl fmt::Display for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessSpec::Multiline { k } => write!(f, "multiline k={k}"),
            ProcessSpec::Plane { model: PlaneModel::HalfPlane { slope } } => {
                write!(f, "plane-i m={slope}")
            }
            ProcessSpec::Plane { model: PlaneModel::Circle } => f.write_str("plane-ii"),
            ProcessSpec::Plane { model: PlaneModel::Dominance } => f.write_str("plane-iii"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub n_min: u64,
    pub n_max: u64,
    pub checkpoints: usize,
    pub samples: u64,
    pub seed: u64,
    /// Replica `r` uses stream `stream_offset + r`.
    pub stream_offset: u64,
    pub workers: usize,
    pub naive: bool,
    pub metric: Metric,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(process: ProcessSpec) -> Self {
        Self {
            process,
            n_min: 10_000,
            n_max: 10_000_000,
            checkpoints: 10,
            samples: 100_000,
            seed: 0,
            stream_offset: 0,
            workers: 1,
            naive: false,
            metric: Metric::Euclidean,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        match self.process {
            ProcessSpec::Multiline { k } if k < 2 => return bad(format!("--k must be >= 2, got {k}")),
            ProcessSpec::Plane { model: PlaneModel::HalfPlane { slope } } if !slope.is_finite() => {
                return bad(format!("--slope must be finite, got {slope}"))
            }
            _ => {}
        }
        if self.samples == 0 {
            return bad("--samples must be >= 1".into());
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return bad(format!(
                "need 1 <= --nmin <= --nmax (got {} and {})",
                self.n_min, self.n_max
            ));
        }
        if self.checkpoints == 0 {
            return bad("--checkpoints must be >= 1".into());
        }
        if self.workers == 0 {
            return bad("--workers must be >= 1".into());
        }
        if self.stream_offset.checked_add(self.samples).is_none() {
            return bad("stream range overflows u64".into());
        }
        Ok(())
    }
}
