use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ProcessSpec};
use super::results::{CheckpointRow, ResultsFile, ResultsMeta, ScheduleSpec, StreamRange};
use super::CliError;
use crate::lineproc::run_trace;
use crate::planeproc::run_plane_trace;
use crate::randstream::StreamSpec;
use crate::stats::{checkpoint_schedule, MomentAccumulator};

/// Replicas per work unit. Fixed so the merge tree, and hence every bit of
/// the output, is independent of the worker count.
const BLOCK: u64 = 256;

pub const GENERATOR_NAME: &str = "chacha8 seed_from_u64(seed), stream = stream_offset + replica";

/// Counts at each checkpoint for replica stream `stream_id`.
pub fn run_replica(config: &ExperimentConfig, checkpoints: &[u64], stream_id: u64) -> Result<Vec<usize>, CliError> {
    let mut rng = StreamSpec::new(config.seed, stream_id).generator();
    let trace = match config.process {
        ProcessSpec::Multiline { k } => run_trace(k, checkpoints, &mut rng),
        ProcessSpec::Plane { model } => {
            run_plane_trace(model, checkpoints, &mut rng, !config.naive, config.metric)
        }
    }
    .map_err(|e| CliError::Simulation(format!("stream {stream_id}: {e}")))?;
    Ok(trace.into_iter().map(|(_, c)| c).collect())
}

fn run_block(config: &ExperimentConfig, checkpoints: &[u64], first: u64, last: u64) -> Result<Vec<MomentAccumulator>, CliError> {
    let mut accs = vec![MomentAccumulator::new(); checkpoints.len()];
    for stream in first..last {
        for (acc, c) in accs.iter_mut().zip(run_replica(config, checkpoints, stream)?) {
            acc.push(c as f64);
        }
    }
    Ok(accs)
}

/// Runs every replica of `config` and returns the merged results. Output is
/// identical for any worker count apart from `wall_time_secs`.
pub fn simulate(config: &ExperimentConfig) -> Result<ResultsFile, CliError> {
    config.validate()?;
    let checkpoints = checkpoint_schedule(config.n_min, config.n_max, config.checkpoints)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let first = config.stream_offset;
    let end = first + config.samples;
    let blocks: Vec<(u64, u64)> = (first..end)
        .step_by(BLOCK as usize)
        .map(|b| (b, (b + BLOCK).min(end)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Simulation(e.to_string()))?;
    let partials: Vec<Vec<MomentAccumulator>> = pool.install(|| {
        blocks
            .par_iter()
            .map(|&(a, b)| run_block(config, &checkpoints, a, b))
            .collect::<Result<_, _>>()
    })?;

    let mut totals = vec![MomentAccumulator::new(); checkpoints.len()];
    for part in &partials {
        for (t, p) in totals.iter_mut().zip(part) {
            t.merge_in(p);
        }
    }

    Ok(ResultsFile {
        meta: ResultsMeta {
            process: config.process,
            metric: config.metric,
            schedule: ScheduleSpec {
                nmin: config.n_min,
                nmax: config.n_max,
                count: config.checkpoints,
            },
            checkpoints: checkpoints.clone(),
            samples: config.samples,
            streams: vec![StreamRange {
                seed: config.seed,
                first,
                count: config.samples,
            }],
            trajectory: "checkpointed: one trajectory per replica observed at every checkpoint".into(),
            generator: GENERATOR_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        wall_time_secs: start.elapsed().as_secs_f64(),
        rows: checkpoints
            .into_iter()
            .zip(totals)
            .map(|(n, acc)| CheckpointRow { n, acc })
            .collect(),
    })
}

/// Simulates and writes the results file to `config.out`.
pub fn cmd_simulate(config: &ExperimentConfig) -> Result<ResultsFile, CliError> {
    let out = config
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    let results = simulate(config)?;
    results.write(out)?;
    Ok(results)
}

/// Merges results files that share a configuration signature and use
/// disjoint streams. Rows are combined with the pairwise moment merge.
pub fn merge(files: &[ResultsFile]) -> Result<ResultsFile, CliError> {
    let (head, rest) = files
        .split_first()
        .ok_or_else(|| CliError::Usage("nothing to merge".into()))?;
    let mut merged = head.clone();
    for file in rest {
        if file.meta.signature() != merged.meta.signature() {
            return Err(CliError::Incompatible(format!(
                "cannot merge {} ({:?}) with {} ({:?})",
                merged.meta.process, merged.meta.checkpoints, file.meta.process, file.meta.checkpoints
            )));
        }
        for s in &file.meta.streams {
            if let Some(clash) = merged.meta.streams.iter().find(|m| m.overlaps(s)) {
                return Err(CliError::Incompatible(format!(
                    "stream ranges overlap: {clash:?} and {s:?}"
                )));
            }
        }
        merged.meta.streams.extend(file.meta.streams.iter().copied());
        merged.meta.samples += file.meta.samples;
        merged.wall_time_secs += file.wall_time_secs;
        for (row, other) in merged.rows.iter_mut().zip(&file.rows) {
            row.acc.merge_in(&other.acc);
        }
    }
    merged.validate()?;
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planeproc::PlaneModel;

    fn config(process: ProcessSpec, samples: u64) -> ExperimentConfig {
        ExperimentConfig {
            n_min: 10,
            n_max: 1000,
            checkpoints: 3,
            samples,
            seed: 17,
            ..ExperimentConfig::new(process)
        }
    }

    #[test]
    fn one_step_mean_is_one() {
        let mut c = config(ProcessSpec::Multiline { k: 2 }, 100);
        (c.n_min, c.n_max, c.checkpoints) = (1, 1, 1);
        let r = simulate(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].acc.mean, 1.0);
        assert_eq!(r.rows[0].acc.count, 100);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        for process in [
            ProcessSpec::Multiline { k: 3 },
            ProcessSpec::Plane { model: PlaneModel::Dominance },
        ] {
            let mut c = config(process, 600);
            let one = simulate(&c).unwrap();
            c.workers = 4;
            let four = simulate(&c).unwrap();
            assert_eq!(one.rows, four.rows);
            assert_eq!(one.meta, four.meta);
        }
    }

    #[test]
    fn naive_and_grid_runs_agree() {
        let mut c = config(ProcessSpec::Plane { model: PlaneModel::Circle }, 20);
        let grid = simulate(&c).unwrap();
        c.naive = true;
        assert_eq!(simulate(&c).unwrap().rows, grid.rows);
    }

    #[test]
    fn merge_matches_single_run() {
        let c = config(ProcessSpec::Multiline { k: 3 }, 1000);
        let whole = simulate(&c).unwrap();
        let a = simulate(&ExperimentConfig { samples: 500, ..c.clone() }).unwrap();
        let b = simulate(&ExperimentConfig { samples: 500, stream_offset: 500, ..c.clone() }).unwrap();
        let merged = merge(&[a.clone(), b]).unwrap();
        assert_eq!(merged.meta.samples, 1000);
        for (m, w) in merged.rows.iter().zip(&whole.rows) {
            let (sm, sw) = (m.acc.summary().unwrap(), w.acc.summary().unwrap());
            for (x, y) in [
                (sm.mean, sw.mean),
                (sm.sd, sw.sd),
                (sm.skewness.unwrap(), sw.skewness.unwrap()),
                (sm.kurtosis.unwrap(), sw.kurtosis.unwrap()),
            ] {
                assert!((x - y).abs() <= 1e-9 * y.abs().max(1e-3), "{x} vs {y}");
            }
        }
        assert_eq!(merge(std::slice::from_ref(&a)).unwrap(), a);
        assert!(matches!(merge(&[a.clone(), a.clone()]), Err(CliError::Incompatible(_))));
        let other = simulate(&config(ProcessSpec::Multiline { k: 4 }, 10)).unwrap();
        assert!(matches!(merge(&[a, other]), Err(CliError::Incompatible(_))));
    }

    #[test]
    fn invalid_configs() {
        assert!(simulate(&config(ProcessSpec::Multiline { k: 1 }, 5)).is_err());
        assert!(simulate(&config(ProcessSpec::Multiline { k: 2 }, 0)).is_err());
        let c = config(ProcessSpec::Plane { model: PlaneModel::HalfPlane { slope: f64::NAN } }, 5);
        assert!(matches!(simulate(&c), Err(CliError::Usage(_))));
    }
}
