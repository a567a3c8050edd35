//! One-pass, mergeable central-moment statistics.
//!
//! Updates follow the single-observation and pairwise combination formulas
//! for the centered sums M2, M3, M4 (Terriberry / Pébay).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("{moment} needs at least {needed} observations, have {count}")]
    InsufficientCount {
        moment: &'static str,
        needed: u64,
        count: u64,
    },
    #[error("{0} is undefined for zero-variance data")]
    ZeroVariance(&'static str),
    #[error("invalid checkpoint schedule: {0}")]
    InvalidSchedule(String),
}

/// Sufficient statistics for mean, variance, skewness and kurtosis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

/// Derived statistics. Skewness and kurtosis are `None` when undefined; the
/// corresponding [`MomentAccumulator`] accessors report why.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    pub sd: f64,
    pub se_mean: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    /// Combined statistics of both observation multisets.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;

        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self {
            count: self.count + other.count,
            mean,
            m2,
            m3,
            m4,
        }
    }

    pub fn merge_in(&mut self, other: &Self) {
        *self = self.merge(other);
    }

    /// Sample standard deviation, `count - 1` divisor.
    pub fn sd(&self) -> Result<f64, MomentError> {
        if self.count < 2 {
            return Err(MomentError::InsufficientCount {
                moment: "standard deviation",
                needed: 2,
                count: self.count,
            });
        }
        Ok((self.m2.max(0.0) / (self.count - 1) as f64).sqrt())
    }

    /// `m3 / m2^(3/2)` with count-divisor central moments.
    pub fn skewness(&self) -> Result<f64, MomentError> {
        self.check_shape_moment("skewness")?;
        let n = self.count as f64;
        let m2 = self.m2 / n;
        Ok((self.m3 / n) / m2.powf(1.5))
    }

    /// Non-excess kurtosis `m4 / m2^2` (3 for a Gaussian).
    pub fn kurtosis(&self) -> Result<f64, MomentError> {
        self.check_shape_moment("kurtosis")?;
        let n = self.count as f64;
        let m2 = self.m2 / n;
        Ok((self.m4 / n) / (m2 * m2))
    }

    fn check_shape_moment(&self, moment: &'static str) -> Result<(), MomentError> {
        if self.count < 3 {
            return Err(MomentError::InsufficientCount {
                moment,
                needed: 3,
                count: self.count,
            });
        }
        if self.m2 <= 0.0 {
            return Err(MomentError::ZeroVariance(moment));
        }
        Ok(())
    }

    pub fn summary(&self) -> Result<Summary, MomentError> {
        let sd = self.sd()?;
        Ok(Summary {
            count: self.count,
            mean: self.mean,
            sd,
            se_mean: sd / (self.count as f64).sqrt(),
            skewness: self.skewness().ok(),
            kurtosis: self.kurtosis().ok(),
        })
    }
}

impl Extend<f64> for MomentAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// `count` integers with log-equally spaced values from `n_min` to `n_max`,
/// rounded to nearest and deduplicated. The end points are exact.
pub fn checkpoint_schedule(n_min: u64, n_max: u64, count: usize) -> Result<Vec<u64>, MomentError> {
    if n_min == 0 || n_min > n_max || count == 0 {
        return Err(MomentError::InvalidSchedule(format!(
            "need 1 <= nmin <= nmax and count >= 1 (nmin={n_min}, nmax={n_max}, count={count})"
        )));
    }
    if count == 1 {
        if n_min != n_max {
            return Err(MomentError::InvalidSchedule(
                "a single checkpoint requires nmin == nmax".into(),
            ));
        }
        return Ok(vec![n_min]);
    }
    let lo = (n_min as f64).ln();
    let hi = (n_max as f64).ln();
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            if i == 0 {
                n_min
            } else if i == count - 1 {
                n_max
            } else {
                let t = i as f64 / (count - 1) as f64;
                ((lo + t * (hi - lo)).exp().round() as u64).clamp(n_min, n_max)
            }
        })
        .collect();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || a == b
    }

    /// Two-pass reference for (mean, M2, M3, M4).
    fn two_pass(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>();
        (mean, m(2), m(3), m(4))
    }

    #[test]
    fn push_small_example() {
        let acc: MomentAccumulator = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(acc.count, 4);
        assert_eq!(acc.mean, 2.5);
        assert!((acc.m2 - 5.0).abs() < 1e-12);
        let s = acc.summary().unwrap();
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(s.skewness.unwrap().abs() < 1e-12);
        // m2 = 1.25, m4 = (2*5.0625 + 2*0.0625)/4 = 2.5625
        assert!((s.kurtosis.unwrap() - 2.5625 / 1.5625).abs() < 1e-12);
    }

    #[test]
    fn single_and_constant() {
        let mut acc = MomentAccumulator::new();
        acc.push(7.5);
        assert_eq!((acc.mean, acc.m2, acc.m3, acc.m4), (7.5, 0.0, 0.0, 0.0));
        assert!(matches!(acc.sd(), Err(MomentError::InsufficientCount { .. })));

        let acc: MomentAccumulator = std::iter::repeat_n(3.25, 5).collect();
        assert_eq!(acc.mean, 3.25);
        assert_eq!(acc.m2, 0.0);
        assert_eq!(acc.sd().unwrap(), 0.0);
        assert_eq!(acc.skewness(), Err(MomentError::ZeroVariance("skewness")));
        assert_eq!(acc.kurtosis(), Err(MomentError::ZeroVariance("kurtosis")));
        let s = acc.summary().unwrap();
        assert_eq!((s.skewness, s.kurtosis), (None, None));
    }

    #[test]
    fn empty_is_zero() {
        let acc = MomentAccumulator::new();
        assert_eq!((acc.count, acc.mean, acc.m2, acc.m3, acc.m4), (0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn merge_examples() {
        let a: MomentAccumulator = [1.0, 2.0].into_iter().collect();
        let b: MomentAccumulator = [3.0, 4.0].into_iter().collect();
        let m = a.merge(&b);
        assert_eq!(m.count, 4);
        assert!((m.mean - 2.5).abs() < 1e-15);
        assert!((m.m2 - 5.0).abs() < 1e-12);
        assert_eq!(MomentAccumulator::new().merge(&a), a);
        assert_eq!(a.merge(&MomentAccumulator::new()), a);
        let ba = b.merge(&a);
        for (x, y) in [(m.mean, ba.mean), (m.m2, ba.m2), (m.m4, ba.m4)] {
            assert!(rel_close(x, y, 1e-9));
        }
        assert!((m.m3 - ba.m3).abs() < 1e-9);
    }

    #[test]
    fn matches_two_pass() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>().powi(3) * 50.0).collect();
        let acc: MomentAccumulator = xs.iter().copied().collect();
        let (mean, m2, m3, m4) = two_pass(&xs);
        assert!(rel_close(acc.mean, mean, 1e-12));
        assert!(rel_close(acc.m2, m2, 1e-10));
        assert!(rel_close(acc.m3, m3, 1e-9));
        assert!(rel_close(acc.m4, m4, 1e-9));
    }

    #[test]
    fn gaussian_kurtosis_near_three() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand::rngs::StdRng::seed_from_u64(1972);
        let acc: MomentAccumulator = (0..1_000_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let k = acc.kurtosis().unwrap();
        assert!((k - 3.0).abs() < 0.05, "kurtosis {k}");
        assert!(acc.skewness().unwrap().abs() < 0.01);
    }

    #[test]
    fn schedule_examples() {
        let s = checkpoint_schedule(10_000, 10_000_000, 10).unwrap();
        assert_eq!(
            s,
            vec![
                10_000, 21_544, 46_416, 100_000, 215_443, 464_159, 1_000_000, 2_154_435,
                4_641_589, 10_000_000
            ]
        );
        for w in s.windows(2) {
            assert!((w[1] as f64 / w[0] as f64 - 10f64.powf(1.0 / 3.0)).abs() < 1e-3);
        }
        assert_eq!(checkpoint_schedule(100, 100, 1).unwrap(), vec![100]);
        assert_eq!(checkpoint_schedule(10, 1000, 3).unwrap(), vec![10, 100, 1000]);
        assert_eq!(checkpoint_schedule(1, 3, 10).unwrap(), vec![1, 2, 3]);
        assert!(checkpoint_schedule(0, 10, 3).is_err());
        assert!(checkpoint_schedule(20, 10, 3).is_err());
        assert!(checkpoint_schedule(10, 20, 0).is_err());
        assert!(checkpoint_schedule(10, 20, 1).is_err());
    }

    fn fields(acc: &MomentAccumulator) -> [f64; 5] {
        let s = acc.summary().unwrap();
        [s.mean, s.sd, s.skewness.unwrap(), s.kurtosis.unwrap(), s.se_mean]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn any_partition_any_order_matches_sequential(
            seed in any::<u64>(),
            cuts in proptest::collection::vec(0usize..10_000, 0..40),
        ) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>() * 100.0 + rng.random::<f64>().powi(4) * 30.0).collect();
            let sequential: MomentAccumulator = xs.iter().copied().collect();

            let mut bounds = cuts.clone();
            bounds.push(0);
            bounds.push(xs.len());
            bounds.sort_unstable();
            bounds.dedup();
            let mut parts: Vec<MomentAccumulator> = bounds
                .windows(2)
                .map(|w| xs[w[0]..w[1]].iter().copied().collect())
                .collect();
            // merge in a seed-dependent order and bracketing
            while parts.len() > 1 {
                let i = rng.random_range(0..parts.len());
                let a = parts.swap_remove(i);
                let j = rng.random_range(0..parts.len());
                parts[j] = if rng.random::<bool>() { a.merge(&parts[j]) } else { parts[j].merge(&a) };
            }
            let merged = parts[0];
            prop_assert_eq!(merged.count, sequential.count);
            for (x, y) in fields(&merged).iter().zip(fields(&sequential).iter()) {
                prop_assert!(rel_close(*x, *y, 1e-9), "{} vs {}", x, y);
            }
        }

        #[test]
        fn scale_equivariance(
            xs in proptest::collection::vec(-1e3f64..1e3, 3..200),
            c in 0.01f64..100.0,
        ) {
            let a: MomentAccumulator = xs.iter().copied().collect();
            prop_assume!(a.m2 > 1e-6);
            let b: MomentAccumulator = xs.iter().map(|x| c * x).collect();
            let (sa, sb) = (a.summary().unwrap(), b.summary().unwrap());
            prop_assert!((sb.mean - c * sa.mean).abs() <= 1e-9 * (c * xs.iter().map(|x| x.abs()).fold(0.0, f64::max)));
            prop_assert!(rel_close(sb.sd, c * sa.sd, 1e-9));
            prop_assert!((sb.skewness.unwrap() - sa.skewness.unwrap()).abs() < 1e-9 * sa.skewness.unwrap().abs().max(1.0));
            prop_assert!(rel_close(sb.kurtosis.unwrap(), sa.kurtosis.unwrap(), 1e-9));
        }

        #[test]
        fn m2_m4_nonnegative(xs in proptest::collection::vec(-1e6f64..1e6, 0..100)) {
            let a: MomentAccumulator = xs.iter().copied().collect();
            prop_assert!(a.m2 >= 0.0 && a.m4 >= 0.0);
        }
    }
}
