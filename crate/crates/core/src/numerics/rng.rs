//! Seeded random streams.
//!
//! `RandomSource` is ChaCha8 keyed by `seed_from_u64(seed)` (the rand_core
//! PCG32 seed expansion), so a given seed yields the same stream on every
//! platform. Gaussian variates use `rand_distr::StandardNormal`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::linalg::norm;

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            draws: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of primitive draws taken so far.
    pub fn counter(&self) -> u64 {
        self.draws
    }

    /// Independent child stream; see [`child_seed`].
    pub fn fork(&self, stream: u64) -> RandomSource {
        RandomSource::new(child_seed(self.seed, stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }

    pub fn gaussian(&mut self) -> f64 {
        self.draws += 1;
        self.rng.sample(StandardNormal)
    }

    /// Uniform index in `0..bound`.
    pub fn index(&mut self, bound: usize) -> usize {
        self.draws += 1;
        self.rng.random_range(0..bound)
    }
}

/// Seed of stream `stream` derived from `parent`: the SplitMix64 finalizer
/// applied to `parent + (stream + 1) * 0x9E3779B97F4A7C15` (wrapping).
pub fn child_seed(parent: u64, stream: u64) -> u64 {
    let mut z = parent.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform point on the unit sphere in ℝⁿ by normalizing a Gaussian vector.
pub fn sample_unit_sphere(n: usize, rng: &mut RandomSource) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let r = norm(&g);
        if r > 1e-300 {
            return g.into_iter().map(|v| v / r).collect();
        }
    }
}
