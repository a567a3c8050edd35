//! Results file: a `#`-prefixed header block followed by tab-separated raw
//! accumulators, one row per checkpoint.
//!
//! ```text
//! # hammersley-results v1
//! # meta {"process":{...},"checkpoints":[...],"samples":...,"streams":[...],...}
//! # wall_time_secs 12.5
//! n	count	mean	m2	m3	m4
//! 10000	20000	381.1	...
//! ```
//!
//! Floats use Rust's shortest round-trip rendering, so reading a file back
//! reproduces every accumulator bit for bit. Wall time sits on its own line;
//! everything else is a pure function of the configuration and seeds.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ProcessSpec;
use super::CliError;
use crate::planeproc::Metric;
use crate::stats::MomentAccumulator;

pub const MAGIC: &str = "# hammersley-results v1";
const COLUMNS: &str = "n\tcount\tmean\tm2\tm3\tm4";

/// Contiguous block of replica streams `first .. first + count` under `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamRange {
    pub seed: u64,
    pub first: u64,
    pub count: u64,
}

impl StreamRange {
    pub fn overlaps(&self, other: &StreamRange) -> bool {
        self.seed == other.seed
            && self.first < other.first + other.count
            && other.first < self.first + self.count
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsMeta {
    pub process: ProcessSpec,
    pub metric: Metric,
    pub schedule: ScheduleSpec,
    pub checkpoints: Vec<u64>,
    pub samples: u64,
    pub streams: Vec<StreamRange>,
    /// How checkpoints relate: every replica is one trajectory observed at all
    /// checkpoints.
    pub trajectory: String,
    pub generator: String,
    pub version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub nmin: u64,
    pub nmax: u64,
    pub count: usize,
}

impl ResultsMeta {
    /// Everything that must match for two files to be mergeable.
    pub fn signature(&self) -> (ProcessSpec, Metric, &[u64]) {
        (self.process, self.metric, &self.checkpoints)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRow {
    pub n: u64,
    pub acc: MomentAccumulator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsFile {
    pub meta: ResultsMeta,
    pub wall_time_secs: f64,
    pub rows: Vec<CheckpointRow>,
}

impl ResultsFile {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Format(m));
        if self.rows.is_empty() {
            return bad("results file has no checkpoint rows".into());
        }
        let ns: Vec<u64> = self.rows.iter().map(|r| r.n).collect();
        if ns != self.meta.checkpoints {
            return bad(format!(
                "rows {:?} do not match the checkpoint schedule {:?}",
                ns, self.meta.checkpoints
            ));
        }
        if let Some(r) = self.rows.iter().find(|r| r.acc.count != self.meta.samples) {
            return bad(format!(
                "checkpoint n={} has count {} but samples = {}",
                r.n, r.acc.count, self.meta.samples
            ));
        }
        let streamed: u64 = self.meta.streams.iter().map(|s| s.count).sum();
        if streamed != self.meta.samples {
            return bad(format!(
                "stream ranges cover {streamed} replicas but samples = {}",
                self.meta.samples
            ));
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let meta = serde_json::to_string(&self.meta).expect("metadata serializes");
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "# meta {meta}").unwrap();
        writeln!(out, "# wall_time_secs {}", self.wall_time_secs).unwrap();
        writeln!(out, "{COLUMNS}").unwrap();
        for r in &self.rows {
            let a = &r.acc;
            writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.n, a.count, a.mean, a.m2, a.m3, a.m4).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |m: String| CliError::Format(m);
        let mut lines = text.lines();
        if lines.next().map(str::trim_end) != Some(MAGIC) {
            return Err(bad("missing results header".into()));
        }
        let mut meta: Option<ResultsMeta> = None;
        let mut wall_time_secs = 0.0;
        let mut rows = Vec::new();
        let mut saw_columns = false;
        for (lineno, line) in lines.enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# meta ") {
                meta = Some(
                    serde_json::from_str(rest)
                        .map_err(|e| bad(format!("bad metadata: {e}")))?,
                );
            } else if let Some(rest) = line.strip_prefix("# wall_time_secs ") {
                wall_time_secs = rest
                    .trim()
                    .parse()
                    .map_err(|e| bad(format!("bad wall time: {e}")))?;
            } else if line.starts_with('#') {
                continue;
            } else if line == COLUMNS {
                saw_columns = true;
            } else {
                if !saw_columns {
                    return Err(bad("data row before column header".into()));
                }
                rows.push(parse_row(line).map_err(|e| bad(format!("line {}: {e}", lineno + 2)))?);
            }
        }
        let meta = meta.ok_or_else(|| bad("missing metadata line".into()))?;
        let file = ResultsFile {
            meta,
            wall_time_secs,
            rows,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }

    /// `(n, mean)` or `(n, sd)` per checkpoint.
    pub fn series(&self, column: Column) -> Result<Vec<(f64, f64)>, CliError> {
        self.rows
            .iter()
            .map(|r| {
                let y = match column {
                    Column::Mean => r.acc.mean,
                    Column::Sd => r.acc.sd().map_err(|e| CliError::Format(format!("n={}: {e}", r.n)))?,
                };
                Ok((r.n as f64, y))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Mean,
    Sd,
}

impl std::str::FromStr for Column {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Column::Mean),
            "sd" => Ok(Column::Sd),
            other => Err(format!("unknown column {other:?} (expected mean or sd)")),
        }
    }
}

fn parse_row(line: &str) -> Result<CheckpointRow, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 6 {
        return Err(format!("expected 6 fields, found {}", fields.len()));
    }
    let f = |i: usize| fields[i].parse::<f64>().map_err(|e| format!("field {i}: {e}"));
    let n = fields[0].parse::<u64>().map_err(|e| format!("n: {e}"))?;
    let count = fields[1].parse::<u64>().map_err(|e| format!("count: {e}"))?;
    Ok(CheckpointRow {
        n,
        acc: MomentAccumulator {
            count,
            mean: f(2)?,
            m2: f(3)?,
            m3: f(4)?,
            m4: f(5)?,
        },
    })
}
