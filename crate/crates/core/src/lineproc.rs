//! The k-line cascade process. Line 1 receives a new particle each step; the
//! nearest particle to its right is bumped down to line 2, and so on. A
//! particle bumped off the last line leaves the system. With `k = 2` this is
//! the classic one-line Hammersley process.

use thiserror::Error;

use crate::oracle::Permutation;
use crate::randstream::StreamRng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("position {0} outside [0, 1]")]
    PositionOutOfRange(f64),
    #[error("distinct-positions violation: {position} already on line {line}")]
    DuplicatePosition { line: usize, position: f64 },
    #[error("checkpoint list is empty")]
    EmptyCheckpoints,
    #[error("checkpoints must be positive and strictly ascending")]
    UnorderedCheckpoints,
}

/// One line of the system, kept sorted ascending.
///
/// The process only ever needs "insert x, then remove x's strict successor".
/// Since no stored position lies strictly between x and that successor, the
/// combined operation is an in-place overwrite, and an insert without a
/// successor is an append. Both cost one binary search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Line {
    positions: Vec<f64>,
}

impl Line {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Smallest stored position strictly greater than `x`.
    pub fn successor(&self, x: f64) -> Option<f64> {
        let i = self.positions.partition_point(|&p| p <= x);
        self.positions.get(i).copied()
    }

    /// Inserts `x` and removes and returns its strict successor, if any.
    /// Returns `Err(())` if `x` is already present.
    #[inline]
    fn insert_bump(&mut self, x: f64) -> Result<Option<f64>, ()> {
        let i = self.positions.partition_point(|&p| p < x);
        match self.positions.get_mut(i) {
            None => {
                self.positions.push(x);
                Ok(None)
            }
            Some(slot) if *slot == x => Err(()),
            Some(slot) => Ok(Some(std::mem::replace(slot, x))),
        }
    }
}

/// State of the `k - 1` stacked lines, line 1 on top.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSystem {
    k: usize,
    lines: Vec<Line>,
    steps: u64,
}

impl LineSystem {
    /// Empty system for the monotone pattern of length `k`.
    pub fn new(k: usize) -> Result<Self, ProcessError> {
        if k < 2 {
            return Err(ProcessError::InvalidK(k));
        }
        Ok(Self {
            k,
            lines: vec![Line::default(); k - 1],
            steps: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Lines top to bottom; index 0 is line 1.
    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn particle_count(&self) -> usize {
        self.lines.iter().map(Line::len).sum()
    }

    /// Drops a particle at `u` on line 1 and cascades the bumps. Returns the
    /// particle that left the bottom line, if any.
    ///
    /// On a duplicate position the system is left partially updated and should
    /// be discarded; duplicates only arise from a faulty driver.
    pub fn step(&mut self, u: f64) -> Result<Option<f64>, ProcessError> {
        if !(0.0..=1.0).contains(&u) {
            return Err(ProcessError::PositionOutOfRange(u));
        }
        self.steps += 1;
        let mut carry = u;
        for (j, line) in self.lines.iter_mut().enumerate() {
            match line.insert_bump(carry) {
                Ok(Some(bumped)) => carry = bumped,
                Ok(None) => return Ok(None),
                Err(()) => {
                    return Err(ProcessError::DuplicatePosition {
                        line: j + 1,
                        position: carry,
                    })
                }
            }
        }
        Ok(Some(carry))
    }
}

pub(crate) fn validate_checkpoints(checkpoints: &[u64]) -> Result<(), ProcessError> {
    if checkpoints.is_empty() {
        return Err(ProcessError::EmptyCheckpoints);
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ProcessError::UnorderedCheckpoints);
    }
    Ok(())
}

/// Runs one trajectory to the last checkpoint and records the particle count
/// at each checkpoint.
pub fn run_trace(
    k: usize,
    checkpoints: &[u64],
    rng: &mut StreamRng,
) -> Result<Vec<(u64, usize)>, ProcessError> {
    validate_checkpoints(checkpoints)?;
    let mut sys = LineSystem::new(k)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut n = 0;
    for &target in checkpoints {
        while n < target {
            sys.step(rng.uniform01())?;
            n += 1;
        }
        out.push((n, sys.particle_count()));
    }
    Ok(out)
}

/// Drives the system with `sigma_i / (n + 1)` and returns the final count.
pub fn run_permutation(k: usize, sigma: &Permutation) -> Result<usize, ProcessError> {
    let mut sys = LineSystem::new(k)?;
    let scale = (sigma.len() + 1) as f64;
    for &v in sigma.as_slice() {
        sys.step(v as f64 / scale)?;
    }
    Ok(sys.particle_count())
}
