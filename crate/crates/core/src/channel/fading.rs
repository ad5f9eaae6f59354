//! Nakagami-m magnitude sampling.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Nakagami-m distribution with shape `m` and spread `Ω = E[X²]`.
///
/// Draws are `sqrt(G)` with `G ~ Gamma(m, Ω/m)`, which has exactly the
/// Nakagami density.
#[derive(Debug, Clone, Copy)]
pub struct Nakagami {
    m: f64,
    omega: f64,
    gamma: Gamma<f64>,
}

impl Nakagami {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::arg(format!(
                "Nakagami parameters must be positive: m={m}, omega={omega}"
            )));
        }
        let gamma = Gamma::new(m, omega / m)
            .map_err(|e| Error::arg(format!("Nakagami(m={m}, omega={omega}): {e}")))?;
        Ok(Nakagami { m, omega, gamma })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Distribution<f64> for Nakagami {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng).sqrt()
    }
}

/// One Nakagami-m magnitude.
pub fn sample_nakagami<R: Rng + ?Sized>(m: f64, omega: f64, rng: &mut R) -> Result<f64> {
    Ok(Nakagami::new(m, omega)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ks_distance, RngStream};

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RngStream::new(0, 0);
        assert!(sample_nakagami(0.0, 1.0, &mut rng).is_err());
        assert!(sample_nakagami(1.0, -1.0, &mut rng).is_err());
        assert!(sample_nakagami(f64::NAN, 1.0, &mut rng).is_err());
    }

    #[test]
    fn second_moment_is_omega() {
        for m in [0.5, 1.0, 2.5, 7.0] {
            let d = Nakagami::new(m, 1.0).unwrap();
            let mut rng = RngStream::new(42, 1);
            let n = 100_000;
            let mean: f64 = (0..n).map(|_| d.sample(&mut rng).powi(2)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.01, "m={m}: {mean}");
        }
    }

    #[test]
    fn fourth_moment() {
        // Ω²(1 + 1/m) with m = 2.5
        let d = Nakagami::new(2.5, 1.0).unwrap();
        let mut rng = RngStream::new(42, 2);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| d.sample(&mut rng).powi(4)).sum::<f64>() / n as f64;
        assert!((mean / 1.4 - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn unit_shape_is_rayleigh() {
        let d = Nakagami::new(1.0, 1.0).unwrap();
        let mut rng = RngStream::new(42, 3);
        let xs: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
        assert!(xs.iter().all(|&x| x > 0.0));
        let ks = ks_distance(&xs, |x| 1.0 - (-x * x).exp()).unwrap();
        assert!(ks < 0.01, "KS {ks}");
    }
}
