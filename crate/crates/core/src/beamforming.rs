//! Effective channels, MRT precoding, rates, the ideal gain bound and
//! opportunistic user selection.

use std::f64::consts::TAU;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{wrap_phase, CMatrix, CVector, C64};

/// Phase shifts of all `M` reflecting elements, surfaces stacked in order.
/// Every angle lies in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    theta: Vec<f64>,
}

impl PhaseConfig {
    /// Accepts angles already in `[0, 2π)`.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(bad) = theta.iter().find(|t| !(0.0..TAU).contains(*t)) {
            return Err(Error::arg(format!("phase {bad} outside [0, 2π)")));
        }
        Ok(PhaseConfig { theta })
    }

    /// Wraps arbitrary finite angles into `[0, 2π)`.
    pub fn wrapped(theta: impl IntoIterator<Item = f64>) -> Self {
        PhaseConfig {
            theta: theta.into_iter().map(wrap_phase).collect(),
        }
    }

    /// Takes each element's phase from the argument of a complex number;
    /// zero maps to phase 0.
    pub fn from_phasors<'a>(z: impl IntoIterator<Item = &'a C64>) -> Self {
        Self::wrapped(z.into_iter().map(|z| {
            if *z == C64::new(0.0, 0.0) {
                0.0
            } else {
                z.arg()
            }
        }))
    }

    pub fn zeros(m: usize) -> Self {
        PhaseConfig {
            theta: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Reflection coefficients `e^{jθ_m}`.
    pub fn coefficients(&self) -> CVector {
        self.theta
            .iter()
            .map(|&t| C64::from_polar(1.0, t))
            .collect()
    }
}

/// Unit-norm transmit beamformer of length `N_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    w: CVector,
}

impl Beamformer {
    /// Normalizes `v` to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::arg(
                "beamformer direction must be a nonzero finite vector",
            ));
        }
        Ok(Beamformer {
            w: v.scale(C64::new(1.0 / n, 0.0)),
        })
    }

    pub fn vector(&self) -> &CVector {
        &self.w
    }

    pub fn into_vector(self) -> CVector {
        self.w
    }
}

/// `hᵀ = g_kᵀ Θ F + d_kᵀ`, returned as a length-`N_b` vector.
pub fn effective_channel(
    g: &CVector,
    theta: &PhaseConfig,
    f: &CMatrix,
    d: &CVector,
) -> Result<CVector> {
    if g.len() != theta.len() || g.len() != f.rows() || d.len() != f.cols() {
        return Err(Error::dim(format!(
            "effective_channel: |g|={} |θ|={} F={}x{} |d|={}",
            g.len(),
            theta.len(),
            f.rows(),
            f.cols(),
            d.len()
        )));
    }
    let reflected: CVector = g
        .iter()
        .zip(theta.angles())
        .map(|(gm, &t)| gm * C64::from_polar(1.0, t))
        .collect();
    f.vec_mul(&reflected)?.add(d)
}

/// Maximal-ratio transmission `w = h* / ‖h‖`, so that `hᵀw = ‖h‖`.
pub fn mrt(h: &CVector) -> Result<Beamformer> {
    if h.is_zero() {
        return Err(Error::arg("mrt: zero channel"));
    }
    Beamformer::normalized(h.conj())
}

/// Spectral efficiency `log2(1 + gain·P_d/σ²)` in bit/s/Hz.
pub fn rate_bpshz(gain: f64, tx_power_w: f64, noise_w: f64) -> Result<f64> {
    if !(noise_w > 0.0) {
        return Err(Error::arg(format!(
            "noise power {noise_w} W must be positive"
        )));
    }
    if !(gain >= 0.0) {
        return Err(Error::arg(format!(
            "channel gain {gain} must be non-negative"
        )));
    }
    Ok((gain * tx_power_w / noise_w).ln_1p() / std::f64::consts::LN_2)
}

/// Upper bound on `‖g_kᵀ Θ F + d_kᵀ‖²` from aligning every cascaded term
/// with the direct path separately on each antenna:
/// `Σ_n (Σ_m |g_m||f_{m,n}| + |d_n|)²`.
pub fn gamma_max(g: &CVector, f: &CMatrix, d: &CVector) -> Result<f64> {
    if g.len() != f.rows() || d.len() != f.cols() {
        return Err(Error::dim(format!(
            "gamma_max: |g|={} F={}x{} |d|={}",
            g.len(),
            f.rows(),
            f.cols(),
            d.len()
        )));
    }
    let mut per_antenna: Vec<f64> = d.iter().map(|z| z.norm()).collect();
    for (m, gm) in g.iter().enumerate() {
        let gm = gm.norm();
        for (acc, fmn) in per_antenna.iter_mut().zip(f.row(m)) {
            *acc += gm * fmn.norm();
        }
    }
    Ok(per_antenna.iter().map(|a| a * a).sum())
}

/// `gamma_max` of every user in the realization.
pub fn gamma_max_all(ch: &ChannelRealization) -> Result<Vec<f64>> {
    ch.g.iter()
        .zip(&ch.d)
        .map(|(g, d)| gamma_max(g, &ch.f, d))
        .collect()
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Opportunistic selection: the (0-based) user with the largest
/// `gamma_max`. Rates are monotone in gain, so this is also the best user
/// under ideal phases.
pub fn select_user(ch: &ChannelRealization) -> Result<usize> {
    let gains = gamma_max_all(ch)?;
    argmax(&gains).ok_or_else(|| Error::arg("select_user: no users"))
}
