//! Complex linear algebra, Hermitian eigendecomposition, random streams and
//! empirical CDFs.

mod cdf;
mod eig;
mod linalg;
mod rng;

pub use cdf::{empirical_cdf, ks_distance};
pub use eig::{hermitian_eig, HermitianEig};
pub use linalg::{CMatrix, CVector, C64};
pub use rng::{complex_gaussian, complex_gaussian_vector, RngStream};

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = theta.rem_euclid(tau);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= tau {
        0.0
    } else {
        r
    }
}
