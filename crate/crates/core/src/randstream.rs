//! Seedable, substreamed uniform randomness.
//!
//! Every generator is a ChaCha8 stream cipher keyed by `seed` (expanded to a
//! 256-bit key by `SeedableRng::seed_from_u64`, a PCG32 expansion) with the
//! 64-bit ChaCha stream/nonce word set to `stream_id`. Replica `r` of an
//! experiment always uses `stream_id = stream_offset + r`, so raw results do
//! not depend on how replicas are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// 2^-53: spacing of the doubles produced by [`StreamRng::uniform01`].
const UNIT_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Identifies one reproducible stream: `(seed, stream_id)` fully determines
/// the output sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl StreamSpec {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn generator(&self) -> StreamRng {
        StreamRng::new(*self)
    }
}

/// Generator for one replica. Value-like: may be moved between threads but is
/// never shared.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(spec: StreamSpec) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(spec.seed);
        inner.set_stream(spec.stream_id);
        Self { inner }
    }

    /// Next double in `[0, 1)`, built from the top 53 bits of one 64-bit word.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * UNIT_53
    }

    /// A point in the unit square: x is drawn first, then y.
    #[inline]
    pub fn uniform_square(&mut self) -> (f64, f64) {
        let x = self.uniform01();
        let y = self.uniform01();
        (x, y)
    }
}
