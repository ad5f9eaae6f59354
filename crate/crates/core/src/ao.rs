//! Alternating optimization of the reflection phases and the transmit
//! beamformer.
//!
//! With the beamformer `w` fixed, each element's phase is chosen so its
//! cascaded contribution `g_m e^{jθ_m} (f_mᵀ w)` lines up with the direct
//! term `d_kᵀ w`; the triangle inequality then holds with equality. With the
//! phases fixed, MRT is optimal. Neither half-step can lower the objective
//! `|(g_kᵀ Θ F + d_kᵀ) w|²`.

use crate::beamforming::{effective_channel, rate_bpshz, Beamformer, PhaseConfig};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{wrap_phase, CMatrix, CVector, C64};
use crate::sdr::{mrt_or_first_antenna, user_channels};

#[derive(Debug, Clone, PartialEq)]
pub struct AoSettings {
    /// Phase/beamformer rounds to run.
    pub iterations: usize,
    /// Stop early once a round improves the objective by less than this
    /// fraction.
    pub tolerance: Option<f64>,
}

impl Default for AoSettings {
    fn default() -> Self {
        AoSettings {
            iterations: 3,
            tolerance: None,
        }
    }
}

/// Which half-step produced an [`AoState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoStep {
    Init,
    Phase,
    Beamformer,
}

#[derive(Debug, Clone)]
pub struct AoState {
    pub iteration: usize,
    pub step: AoStep,
    pub beamformer: Beamformer,
    pub phases: PhaseConfig,
    /// `|(g_kᵀ Θ F + d_kᵀ) w|²`.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct AoOutcome {
    pub phases: PhaseConfig,
    pub beamformer: Beamformer,
    /// Full-norm gain `‖g_kᵀ Θ_ao F + d_kᵀ‖²`.
    pub gain: f64,
    pub rate_bpshz: f64,
    pub trace: Vec<AoState>,
    pub iterations_run: usize,
    /// The direct link was identically zero, so the start point came from
    /// the cascaded channel instead of `d_k`.
    pub direct_link_blocked: bool,
}

/// MRT on the direct link, `w⁽⁰⁾ = d* / ‖d‖`.
pub fn ao_init(d: &CVector) -> Result<Beamformer> {
    if d.is_zero() {
        return Err(Error::arg("ao_init: direct link is zero"));
    }
    Beamformer::normalized(d.conj())
}

/// Closed-form phase step: `θ_m = φ₀ − arg(g_m) − arg(f_mᵀ w)` with
/// `φ₀ = arg(d_kᵀ w)` (0 when `d_kᵀ w = 0`). Elements whose cascaded
/// coefficient vanishes get phase 0.
pub fn phase_update(g: &CVector, f: &CMatrix, w: &Beamformer, d: &CVector) -> Result<PhaseConfig> {
    let w = w.vector();
    if g.len() != f.rows() || d.len() != f.cols() || w.len() != f.cols() {
        return Err(Error::dim(format!(
            "phase_update: |g|={} F={}x{} |w|={} |d|={}",
            g.len(),
            f.rows(),
            f.cols(),
            w.len(),
            d.len()
        )));
    }
    let direct = d.dot(w)?;
    let phi0 = if direct == C64::new(0.0, 0.0) {
        0.0
    } else {
        direct.arg()
    };
    let fw = f.mul_vec(w)?;
    Ok(PhaseConfig::wrapped(g.iter().zip(fw.iter()).map(
        |(gm, fm)| {
            let cascaded = gm * fm;
            if cascaded == C64::new(0.0, 0.0) {
                0.0
            } else {
                wrap_phase(phi0 - cascaded.arg())
            }
        },
    )))
}

fn objective(
    g: &CVector,
    theta: &PhaseConfig,
    f: &CMatrix,
    d: &CVector,
    w: &Beamformer,
) -> Result<f64> {
    Ok(effective_channel(g, theta, f, d)?
        .dot(w.vector())?
        .norm_sqr())
}

/// Runs AO for one user of a realization.
///
/// The trace holds the start point followed by the state after every half
/// step, so its objectives are non-decreasing.
pub fn ao_iterate(
    ch: &ChannelRealization,
    user: usize,
    tx_power_w: f64,
    settings: &AoSettings,
) -> Result<AoOutcome> {
    if settings.iterations == 0 {
        return Err(Error::arg("ao_iterate: iterations must be at least 1"));
    }
    let (g, d) = user_channels(ch, user)?;
    let f = &ch.f;

    let blocked = d.is_zero();
    let mut w = if blocked {
        // start from MRT on the cascaded channel with all phases at zero
        let h0 = effective_channel(g, &PhaseConfig::zeros(g.len()), f, d)?;
        mrt_or_first_antenna(&h0)?
    } else {
        ao_init(d)?
    };
    let mut theta = PhaseConfig::zeros(g.len());
    let mut trace = vec![AoState {
        iteration: 0,
        step: AoStep::Init,
        beamformer: w.clone(),
        phases: theta.clone(),
        objective: objective(g, &theta, f, d, &w)?,
    }];

    let mut h = CVector::zeros(f.cols());
    let mut iterations_run = 0;
    for it in 1..=settings.iterations {
        let before = trace.last().map_or(0.0, |s| s.objective);
        theta = phase_update(g, f, &w, d)?;
        trace.push(AoState {
            iteration: it,
            step: AoStep::Phase,
            beamformer: w.clone(),
            phases: theta.clone(),
            objective: objective(g, &theta, f, d, &w)?,
        });
        h = effective_channel(g, &theta, f, d)?;
        w = mrt_or_first_antenna(&h)?;
        let after = h.dot(w.vector())?.norm_sqr();
        trace.push(AoState {
            iteration: it,
            step: AoStep::Beamformer,
            beamformer: w.clone(),
            phases: theta.clone(),
            objective: after,
        });
        iterations_run = it;
        if let Some(tol) = settings.tolerance {
            if after - before <= tol * before.abs() {
                break;
            }
        }
    }

    let gain = h.norm_sqr();
    Ok(AoOutcome {
        rate_bpshz: rate_bpshz(gain, tx_power_w, ch.noise_power_w)?,
        phases: theta,
        beamformer: w,
        gain,
        trace,
        iterations_run,
        direct_link_blocked: blocked,
    })
}
