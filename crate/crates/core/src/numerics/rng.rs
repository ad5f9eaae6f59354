//! Reproducible random streams and complex Gaussian draws.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::linalg::{CVector, C64};
use crate::error::{Error, Result};

/// A seeded ChaCha20 stream. The same `(seed, index)` pair always yields
/// the same sequence; distinct indices select disjoint ChaCha streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    index: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(index);
        RngStream { seed, index, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// One circularly-symmetric complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian(rng: &mut RngStream) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `n` i.i.d. draws from `CN(0, 1)`: real and imaginary parts each have
/// variance 1/2.
pub fn complex_gaussian_vector(n: usize, rng: &mut RngStream) -> Result<CVector> {
    if n == 0 {
        return Err(Error::arg("complex_gaussian_vector: n must be at least 1"));
    }
    Ok((0..n).map(|_| complex_gaussian(rng)).collect())
}
