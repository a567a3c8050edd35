//! Reference rows and helpers for building synthetic results files.
#![allow(dead_code)]

use hammersley::cli::results::{CheckpointRow, ResultsFile, ResultsMeta, ScheduleSpec, StreamRange};
use hammersley::cli::ProcessSpec;
use hammersley::stats::{checkpoint_schedule, MomentAccumulator};
use hammersley::Metric;

/// `(4 sqrt(n) - mean) n^(-1/6)` for k = 3.
pub const K3_NORM_MEAN: [f64; 10] = [4.790, 4.869, 4.940, 4.997, 5.056, 5.098, 5.147, 5.175, 5.201, 5.240];
/// `sd n^(-1/6)` for k = 3.
pub const K3_NORM_SD: [f64; 10] = [1.345, 1.358, 1.380, 1.387, 1.388, 1.401, 1.411, 1.410, 1.412, 1.418];
/// `(6 sqrt(n) - mean) n^(-1/6)` for k = 4.
pub const K4_NORM_MEAN: [f64; 10] = [9.188, 9.363, 9.519, 9.647, 9.767, 9.866, 9.963, 10.034, 10.093, 10.172];
pub const K4_NORM_SD: [f64; 10] = [1.727, 1.755, 1.786, 1.800, 1.810, 1.825, 1.840, 1.836, 1.844, 1.849];
/// `mean (ln n)^(-0.234) n^(-0.662)` for the circle model.
pub const CIRCLE_NORM_MEAN: [f64; 10] = [0.671, 0.671, 0.670, 0.670, 0.670, 0.670, 0.670, 0.670, 0.670, 0.670];
/// `sd n^(-0.263)` for the circle model.
pub const CIRCLE_NORM_SD: [f64; 10] = [0.583, 0.596, 0.594, 0.598, 0.600, 0.590, 0.591, 0.609, 0.593, 0.594];

pub fn schedule() -> Vec<u64> {
    checkpoint_schedule(10_000, 10_000_000, 10).unwrap()
}

/// Results file whose rows have exactly the given mean and sd: two samples
/// at `mean ± sd / sqrt(2)` per checkpoint.
pub fn synthetic_file(process: ProcessSpec, ns: &[u64], mean_sd: impl Fn(f64) -> (f64, f64)) -> ResultsFile {
    let rows: Vec<CheckpointRow> = ns
        .iter()
        .map(|&n| {
            let (m, sd) = mean_sd(n as f64);
            let h = sd / 2f64.sqrt();
            let acc: MomentAccumulator = [m - h, m + h].into_iter().collect();
            CheckpointRow { n, acc }
        })
        .collect();
    ResultsFile {
        meta: ResultsMeta {
            process,
            metric: Metric::Euclidean,
            schedule: ScheduleSpec { nmin: ns[0], nmax: *ns.last().unwrap(), count: ns.len() },
            checkpoints: ns.to_vec(),
            samples: 2,
            streams: vec![StreamRange { seed: 0, first: 0, count: 2 }],
            trajectory: "checkpointed".into(),
            generator: "synthetic".into(),
            version: "test".into(),
        },
        wall_time_secs: 0.0,
        rows,
    }
}

/// `(n, y)` pairs on the ten-point schedule from a reference row.
pub fn series(row: &[f64; 10], y: impl Fn(f64, f64) -> f64) -> Vec<(f64, f64)> {
    schedule()
        .into_iter()
        .zip(row)
        .map(|(n, &s)| (n as f64, y(n as f64, s)))
        .collect()
}
