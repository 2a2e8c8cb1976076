//! Seeded, splittable random streams.
//!
//! Every randomized routine in the crate takes a [`RandomStream`] explicitly.
//! Streams are ChaCha12 keyed by the 64-bit seed; labelled substreams select a
//! different ChaCha stream id, so a child never depends on how many values its
//! parent has already drawn.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Root seed of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(parent: u64, label: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in parent.to_le_bytes().iter().chain(label.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: Seed,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: Seed) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: Seed, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.0);
        rng.set_stream(stream);
        RandomStream { seed, stream, rng }
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Independent child stream identified by `label`, starting from its own origin.
    pub fn substream(&self, label: &str) -> RandomStream {
        Self::with_stream(self.seed, fnv1a(self.stream, label))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Uniform integer in `[0, n)`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

pub fn rng_new(seed: Seed) -> RandomStream {
    RandomStream::new(seed)
}
