//! Self-checks run by `hammersley verify`: exhaustive oracle agreement for
//! small `n`, exact laws, grid-versus-naive queries and moment merging.

use super::CliError;
use crate::lineproc::run_permutation;
use crate::oracle::{
    exact_distribution, greene_stat, longest_avoiding_bruteforce, ExactDistribution, Permutation,
    EXACT_MAX_N,
};
use crate::planeproc::{nearest_in_region_naive, Metric, PlanarState, PlaneModel, Point};
use crate::randstream::StreamSpec;
use crate::stats::MomentAccumulator;

/// Largest `n` for the exhaustive sweep. Brute force over all of `S_7` for
/// three values of `k` already takes a few seconds.
pub const VERIFY_MAX_N: usize = 7;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub ks: Vec<usize>,
    pub grid_trials: usize,
    pub merge_trials: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_max: VERIFY_MAX_N,
            ks: vec![2, 3, 4],
            grid_trials: 10_000,
            merge_trials: 200,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOutcome {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, name: &str, failures: Vec<String>) {
        let status = if failures.is_empty() { "ok" } else { "FAILED" };
        self.lines.push(format!("{name}: {status}"));
        for f in failures.iter().take(5) {
            self.lines.push(format!("  {f}"));
        }
        self.failures.extend(failures);
    }
}

/// Runs every suite. Returns `Err(Usage)` for options out of range;
/// disagreements are reported in the outcome, not as errors.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyOutcome, CliError> {
    if opts.n_max > VERIFY_MAX_N {
        return Err(CliError::Usage(format!(
            "--nmax {} exceeds the exhaustive limit {VERIFY_MAX_N}",
            opts.n_max
        )));
    }
    if let Some(k) = opts.ks.iter().find(|&&k| k < 2) {
        return Err(CliError::Usage(format!("--k values must be >= 2, got {k}")));
    }
    let mut out = VerifyOutcome::default();
    for &k in opts.ks.iter().filter(|_| opts.n_max > 0) {
        let (failures, laws) = exhaustive(opts.n_max, k);
        out.check(&format!("exhaustive k={k} n<={}", opts.n_max), failures);
        for (n, law) in laws {
            out.lines.push(format!("  law k={k} n={n}: {law}"));
        }
    }
    if opts.grid_trials > 0 {
        out.check(
            &format!("grid vs naive, {} trials", opts.grid_trials),
            grid_suite(opts.grid_trials, opts.seed),
        );
    }
    if opts.merge_trials > 0 {
        out.check(
            &format!("moment merge, {} trials", opts.merge_trials),
            merge_suite(opts.merge_trials, opts.seed),
        );
    }
    Ok(out)
}

/// Process output against RSK and brute force on every permutation of size
/// at most `n_max`, plus the process law against the exact law.
fn exhaustive(n_max: usize, k: usize) -> (Vec<String>, Vec<(usize, ExactDistribution)>) {
    let tau = Permutation::decreasing(k);
    let mut failures = Vec::new();
    let mut laws = Vec::new();
    for n in 1..=n_max.min(EXACT_MAX_N) {
        let mut observed = Vec::new();
        for sigma in Permutation::all(n) {
            let process = run_permutation(k, &sigma).expect("k >= 2");
            let rsk = greene_stat(&sigma, k).expect("k >= 2");
            let brute = longest_avoiding_bruteforce(&sigma, &tau).expect("n <= 7");
            if process != rsk || rsk != brute {
                failures.push(format!("{sigma}: process {process}, rsk {rsk}, brute force {brute}"));
            }
            observed.push(process);
        }
        let law = ExactDistribution::from_values(n, observed);
        let exact = exact_distribution(n, k).expect("n <= 8, k >= 2");
        if law != exact {
            failures.push(format!("n={n}: process law {law} differs from {exact}"));
        }
        laws.push((n, law));
    }
    (failures, laws)
}

const MODELS: [PlaneModel; 3] = [
    PlaneModel::HalfPlane { slope: 1.0 },
    PlaneModel::Circle,
    PlaneModel::Dominance,
];
const METRICS: [Metric; 3] = [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev];

/// Random particle sets, some snapped to a coarse lattice to force ties, each
/// queried through the grid and by linear scan.
fn grid_suite(trials: usize, seed: u64) -> Vec<String> {
    let mut rng = StreamSpec::new(seed, 0x6772_6964).generator();
    let mut failures = Vec::new();
    for t in 0..trials {
        let model = MODELS[t % 3];
        let metric = METRICS[(t / 3) % 3];
        let lattice = t % 4 == 0;
        let mut draw = || {
            let (x, y) = rng.uniform_square();
            if lattice {
                Point::new((x * 8.0).floor() / 8.0, (y * 8.0).floor() / 8.0)
            } else {
                Point::new(x, y)
            }
        };
        let count = 1 + (draw().x * 300.0) as usize;
        let points: Vec<Point> = (0..count).map(|_| draw()).collect();
        let anchor = draw();
        let state = PlanarState::from_points(points.clone(), true, metric);
        let region = model.region(anchor);
        let grid = state.nearest_in_region_grid(anchor, &region);
        let naive = nearest_in_region_naive(&points, anchor, &region, metric);
        if grid != naive {
            failures.push(format!(
                "trial {t} {model:?} {metric}: grid {grid:?}, naive {naive:?}"
            ));
        }
    }
    failures
}

/// Random splits of a sample merged in random order against a single pass.
fn merge_suite(trials: usize, seed: u64) -> Vec<String> {
    let mut rng = StreamSpec::new(seed, 0x6d65_7267).generator();
    let mut failures = Vec::new();
    for t in 0..trials {
        let len = 2 + (rng.uniform01() * 2000.0) as usize;
        let data: Vec<f64> = (0..len)
            .map(|_| {
                let u = rng.uniform01();
                100.0 + 40.0 * u * u * u
            })
            .collect();
        let whole: MomentAccumulator = data.iter().copied().collect();
        let mut parts: Vec<MomentAccumulator> = Vec::new();
        let mut rest = &data[..];
        while !rest.is_empty() {
            let take = 1 + (rng.uniform01() * rest.len() as f64) as usize;
            let (head, tail) = rest.split_at(take.min(rest.len()));
            parts.push(head.iter().copied().collect());
            rest = tail;
        }
        let mut merged = MomentAccumulator::new();
        while !parts.is_empty() {
            let i = (rng.uniform01() * parts.len() as f64) as usize;
            merged.merge_in(&parts.swap_remove(i));
        }
        let (a, b) = (whole.summary(), merged.summary());
        let ok = match (a, b) {
            (Ok(a), Ok(b)) => [
                (a.mean, b.mean),
                (a.sd, b.sd),
                (a.skewness.unwrap_or(0.0), b.skewness.unwrap_or(0.0)),
                (a.kurtosis.unwrap_or(0.0), b.kurtosis.unwrap_or(0.0)),
            ]
            .iter()
            .all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(1.0)),
            _ => false,
        };
        if !ok || merged.count != whole.count {
            failures.push(format!("trial {t}: merged {merged:?} vs single pass {whole:?}"));
        }
    }
    failures
}
