//! Seeded, splittable random streams.
//!
//! A [`RandomStream`] is identified by a `(seed, stream_id)` pair and backed
//! by ChaCha8, whose 64-bit stream selector gives independent sequences for
//! distinct stream ids under the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream with the same seed and a different id.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    /// Child stream for replication `index`: id `(stream_id << 40) | (index + 1)`.
    /// Distinct for `index < 2^40 - 1`, and never equal to the parent id.
    pub fn split(&self, index: u64) -> Self {
        Self::new(self.seed, (self.stream_id << 40) | (index + 1))
    }

    /// Uniform draw on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Exponential draw with the given rate, by inverse-CDF transform.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -(1.0 - self.uniform()).ln() / rate
    }
}
