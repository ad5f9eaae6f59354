//! Joint phase optimization by semidefinite relaxation.
//!
//! The single-user objective `‖g_kᵀ Θ F + d_kᵀ‖²` is homogenized into the
//! quadratic form `vᴴ C v` over `v = [q; t]`, with `C = B Bᴴ` and
//! `B = [diag(g_kᵀ) F; d_kᵀ]`. Relaxing `V = v vᴴ` gives
//!
//! ```text
//! maximize Tr(C V)   subject to   V ⪰ 0,  V_ii = 1
//! ```
//!
//! which has the MaxCut-style diagonal constraint. It is solved here with a
//! low-rank factorization `V = Y Yᴴ` (unit-norm rows) and block-coordinate
//! ascent over the rows. Unit-modulus phases are then recovered by Gaussian
//! randomization with covariance `V`.
//!
//! Lifting convention: for phases `θ`, the lifted vector has entries
//! `q_m = e^{-jθ_m}` and `t = 1`, so that `vᴴ C v` equals the gain.

use rand::Rng;

use crate::beamforming::{effective_channel, mrt, rate_bpshz, Beamformer, PhaseConfig};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{
    complex_gaussian, hermitian_eig, wrap_phase, CMatrix, CVector, RngStream, C64,
};

const PSD_TOL: f64 = 1e-9;

/// Hermitian PSD cost matrix of the homogenized problem, `(M+1)×(M+1)`.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    c: CMatrix,
    // B with C = B Bᴴ, when known
    factor: Option<CMatrix>,
}

impl CostMatrix {
    /// Wraps an arbitrary matrix after checking it is Hermitian and PSD.
    pub fn new(c: CMatrix) -> Result<Self> {
        let eig = hermitian_eig(&c)?;
        let min = *eig.values.last().expect("non-empty");
        if min < -PSD_TOL * c.frobenius_norm().max(f64::MIN_POSITIVE) {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(CostMatrix { c, factor: None })
    }

    /// `B Bᴴ`, PSD by construction.
    pub fn from_factor(b: CMatrix) -> Self {
        CostMatrix {
            c: b.gram(),
            factor: Some(b),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn factor(&self) -> Option<&CMatrix> {
        self.factor.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.c.rows()
    }

    /// `vᴴ C v`.
    pub fn quadratic_form(&self, v: &CVector) -> Result<f64> {
        Ok(v.dotc(&self.c.mul_vec(v)?)?.re)
    }

    /// `Tr(C Y Yᴴ)`.
    pub fn trace_objective(&self, y: &SdpFactor) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in 0..n {
            let yi = y.y.row(i);
            for j in 0..n {
                let cij = self.c[(i, j)];
                if cij == C64::new(0.0, 0.0) {
                    continue;
                }
                let inner: C64 = y.y.row(j).iter().zip(yi).map(|(a, b)| a * b.conj()).sum();
                total += (cij * inner).re;
            }
        }
        total
    }
}

/// Lifted vector `[e^{-jθ}; 1]` for a phase configuration.
pub fn lift(theta: &PhaseConfig) -> CVector {
    theta
        .angles()
        .iter()
        .map(|&t| C64::from_polar(1.0, -t))
        .chain(std::iter::once(C64::new(1.0, 0.0)))
        .collect()
}

/// Phases encoded by a lifted vector: `θ_m = arg(conj(v_m / v_{M+1}))`.
/// Returns `None` when the homogenizing entry is zero.
pub fn unlift(v: &CVector) -> Option<PhaseConfig> {
    let m = v.len().checked_sub(1)?;
    let t = v[m];
    if t == C64::new(0.0, 0.0) {
        return None;
    }
    Some(PhaseConfig::from_phasors(
        v.as_slice()[..m]
            .iter()
            .map(|q| q.conj() * t)
            .collect::<Vec<_>>()
            .iter(),
    ))
}

/// `B = [diag(g)F; dᵀ]`, the `(M+1)×N_b` factor of the cost matrix.
pub fn cost_factor(g: &CVector, f: &CMatrix, d: &CVector) -> Result<CMatrix> {
    if g.len() != f.rows() || d.len() != f.cols() {
        return Err(Error::dim(format!(
            "cost matrix: |g|={} F={}x{} |d|={}",
            g.len(),
            f.rows(),
            f.cols(),
            d.len()
        )));
    }
    let m = f.rows();
    let nb = f.cols();
    Ok(CMatrix::from_fn(m + 1, nb, |i, n| {
        if i < m {
            g[i] * f[(i, n)]
        } else {
            d[n]
        }
    }))
}

/// Builds `C = [[χχᴴ, χd*], [dᵀχᴴ, ‖d‖²]]` with `χ = diag(gᵀ)F`.
pub fn build_cost_matrix(g: &CVector, f: &CMatrix, d: &CVector) -> Result<CostMatrix> {
    Ok(CostMatrix::from_factor(cost_factor(g, f, d)?))
}

/// `V = Y Yᴴ` as an `n × r` factor with unit-norm rows.
#[derive(Debug, Clone)]
pub struct SdpFactor {
    y: CMatrix,
}

impl SdpFactor {
    /// Normalizes every row of `y`. Zero rows are rejected.
    pub fn from_rows(y: CMatrix) -> Result<Self> {
        let mut y = y;
        for i in 0..y.rows() {
            let row = y.row_mut(i);
            let n = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n == 0.0 {
                return Err(Error::arg(format!("SDP factor row {i} is zero")));
            }
            row.iter_mut().for_each(|z| *z /= n);
        }
        Ok(SdpFactor { y })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.y
    }

    pub fn rank(&self) -> usize {
        self.y.cols()
    }

    pub fn dim(&self) -> usize {
        self.y.rows()
    }

    /// The relaxed solution `V = Y Yᴴ`.
    pub fn covariance(&self) -> CMatrix {
        self.y.gram()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdrSettings {
    /// Factor rank; `ceil(sqrt(2n)) + 1` (capped at `n`) when `None`.
    pub rank: Option<usize>,
    pub max_sweeps: usize,
    /// Stop once a sweep improves the objective by less than this fraction.
    pub tolerance: f64,
    /// Gaussian randomization draws.
    pub randomizations: usize,
    /// Seed of the random initial factor.
    pub init_seed: u64,
}

impl Default for SdrSettings {
    fn default() -> Self {
        SdrSettings {
            rank: None,
            max_sweeps: 500,
            tolerance: 1e-8,
            randomizations: 1000,
            init_seed: 0,
        }
    }
}

impl SdrSettings {
    pub fn rank_for(&self, n: usize) -> usize {
        self.rank
            .unwrap_or_else(|| ((2.0 * n as f64).sqrt().ceil() as usize) + 1)
            .clamp(1, n.max(1))
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub factor: SdpFactor,
    pub objective: f64,
    /// Objective after initialization and after every sweep.
    pub history: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Maximizes `Tr(C V)` over `V ⪰ 0` with unit diagonal.
///
/// Each sweep replaces row `i` of `Y` by the normalized `Σ_{j≠i} C_ij y_j`,
/// which maximizes the objective over that row with the others fixed, so
/// the objective never decreases. When the cost matrix carries its factor
/// `B`, the row sums are formed through `Bᴴ Y` in `O(n·N_b·r)` per sweep.
/// An unconverged run returns its last iterate with `converged = false`.
pub fn solve_diag_sdp(cost: &CostMatrix, settings: &SdrSettings) -> Result<SdpSolution> {
    let n = cost.dim();
    if n == 0 {
        return Err(Error::arg("solve_diag_sdp: empty cost matrix"));
    }
    if settings.max_sweeps == 0 {
        return Err(Error::arg("solve_diag_sdp: max_sweeps must be at least 1"));
    }
    let r = settings.rank_for(n);
    let mut rng = RngStream::new(settings.init_seed, 0);
    let mut y = SdpFactor::from_rows(CMatrix::from_fn(n, r, |_, _| complex_gaussian(&mut rng)))?;

    let mut objective = cost.trace_objective(&y);
    let mut history = vec![objective];
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < settings.max_sweeps {
        sweeps += 1;
        match cost.factor() {
            Some(b) => sweep_factored(cost, b, &mut y.y),
            None => sweep_dense(&cost.c, &mut y.y),
        }
        let next = cost.trace_objective(&y);
        let gain = next - objective;
        objective = next;
        history.push(objective);
        if gain <= settings.tolerance * objective.abs() {
            converged = true;
            break;
        }
    }

    Ok(SdpSolution {
        factor: y,
        objective,
        history,
        sweeps,
        converged,
    })
}

fn set_row_if_nonzero(y: &mut CMatrix, i: usize, u: &[C64]) -> bool {
    let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return false;
    }
    for (dst, src) in y.row_mut(i).iter_mut().zip(u) {
        *dst = src / norm;
    }
    true
}

fn sweep_dense(c: &CMatrix, y: &mut CMatrix) {
    let n = c.rows();
    let r = y.cols();
    let mut u = vec![C64::new(0.0, 0.0); r];
    for i in 0..n {
        u.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for j in (0..n).filter(|&j| j != i) {
            let cij = c[(i, j)];
            for (acc, yj) in u.iter_mut().zip(y.row(j)) {
                *acc += cij * yj;
            }
        }
        set_row_if_nonzero(y, i, &u);
    }
}

fn sweep_factored(cost: &CostMatrix, b: &CMatrix, y: &mut CMatrix) {
    let n = b.rows();
    let nb = b.cols();
    let r = y.cols();
    // z = Bᴴ Y, N_b × r
    let mut z = CMatrix::zeros(nb, r);
    for i in 0..n {
        for a in 0..nb {
            let bc = b[(i, a)].conj();
            for (dst, yi) in z.row_mut(a).iter_mut().zip(y.row(i)) {
                *dst += bc * yi;
            }
        }
    }
    let mut u = vec![C64::new(0.0, 0.0); r];
    let mut old = vec![C64::new(0.0, 0.0); r];
    for i in 0..n {
        let cii = cost.c[(i, i)];
        for (k, acc) in u.iter_mut().enumerate() {
            let full: C64 = (0..nb).map(|a| b[(i, a)] * z[(a, k)]).sum();
            *acc = full - cii * y[(i, k)];
        }
        old.copy_from_slice(y.row(i));
        if set_row_if_nonzero(y, i, &u) {
            for a in 0..nb {
                let bc = b[(i, a)].conj();
                for k in 0..r {
                    z[(a, k)] += bc * (y[(i, k)] - old[k]);
                }
            }
        }
    }
}

/// Draws `n_samples` vectors `v̄ = Y r` with `r ~ CN(0, I_r)`, so that
/// `E[v̄ v̄ᴴ] = V`, maps each to unit-modulus phases via `v̄_{1:M}/v̄_{M+1}`,
/// and keeps the candidate with the largest gain. Draws whose last entry is
/// zero are discarded.
pub fn randomize_extract<R: Rng + ?Sized>(
    y: &SdpFactor,
    g: &CVector,
    f: &CMatrix,
    d: &CVector,
    n_samples: usize,
    rng: &mut R,
) -> Result<(PhaseConfig, f64)> {
    if n_samples == 0 {
        return Err(Error::arg(
            "randomize_extract: n_samples must be at least 1",
        ));
    }
    let b = cost_factor(g, f, d)?;
    if y.dim() != b.rows() {
        return Err(Error::dim(format!(
            "SDP factor has {} rows for {} elements",
            y.dim(),
            b.rows() - 1
        )));
    }
    let m = g.len();
    let nb = f.cols();
    let r = y.rank();
    let mut z = vec![C64::new(0.0, 0.0); r];
    let mut vbar = vec![C64::new(0.0, 0.0); m + 1];
    let mut h = vec![C64::new(0.0, 0.0); nb];
    let mut best: Option<(Vec<C64>, f64)> = None;

    for _ in 0..n_samples {
        for zk in z.iter_mut() {
            *zk = gaussian(rng);
        }
        for (i, vi) in vbar.iter_mut().enumerate() {
            *vi = y.y.row(i).iter().zip(&z).map(|(a, b)| a * b).sum();
        }
        let t = vbar[m];
        if t == C64::new(0.0, 0.0) {
            continue;
        }
        // e^{jθ_m} = conj(v̄_m / v̄_{M+1}) / |·|
        h.copy_from_slice(d.as_slice());
        for (mi, vi) in vbar[..m].iter_mut().enumerate() {
            let p = vi.conj() * t;
            let norm = p.norm();
            *vi = if norm > 0.0 {
                p / norm
            } else {
                C64::new(1.0, 0.0)
            };
            for (hn, bn) in h.iter_mut().zip(b.row(mi)) {
                *hn += *vi * bn;
            }
        }
        let gain: f64 = h.iter().map(|x| x.norm_sqr()).sum();
        if best.as_ref().is_none_or(|(_, g0)| gain > *g0) {
            best = Some((vbar[..m].to_vec(), gain));
        }
    }

    let (phasors, gain) =
        best.ok_or_else(|| Error::arg("randomize_extract: every draw was degenerate"))?;
    Ok((
        PhaseConfig::wrapped(phasors.iter().map(|p| wrap_phase(p.arg()))),
        gain,
    ))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    use rand_distr::{Distribution, StandardNormal};
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Result of the SDR-based joint optimization for one user.
#[derive(Debug, Clone)]
pub struct JoOutcome {
    pub phases: PhaseConfig,
    pub beamformer: Beamformer,
    /// `‖g_kᵀ Θ_jo F + d_kᵀ‖²`.
    pub gain: f64,
    pub rate_bpshz: f64,
    pub sdp_objective: f64,
    pub converged: bool,
}

/// Cost matrix → relaxed SDP → randomized phases → MRT on the resulting
/// effective channel → rate.
pub fn jo_pipeline<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    user: usize,
    tx_power_w: f64,
    settings: &SdrSettings,
    rng: &mut R,
) -> Result<JoOutcome> {
    let (g, d) = user_channels(ch, user)?;
    let cost = build_cost_matrix(g, &ch.f, d)?;
    let init_seed = rng.random::<u64>() >> 1;
    let solution = solve_diag_sdp(
        &cost,
        &SdrSettings {
            init_seed,
            ..settings.clone()
        },
    )?;
    let (phases, _) =
        randomize_extract(&solution.factor, g, &ch.f, d, settings.randomizations, rng)?;
    let h = effective_channel(g, &phases, &ch.f, d)?;
    let gain = h.norm_sqr();
    let beamformer = mrt_or_first_antenna(&h)?;
    Ok(JoOutcome {
        rate_bpshz: rate_bpshz(gain, tx_power_w, ch.noise_power_w)?,
        phases,
        beamformer,
        gain,
        sdp_objective: solution.objective,
        converged: solution.converged,
    })
}

pub(crate) fn user_channels(ch: &ChannelRealization, user: usize) -> Result<(&CVector, &CVector)> {
    match (ch.g.get(user), ch.d.get(user)) {
        (Some(g), Some(d)) => Ok((g, d)),
        _ => Err(Error::arg(format!(
            "user {user} out of range for {} users",
            ch.users()
        ))),
    }
}

/// MRT, or the first antenna alone when the channel vanishes entirely.
pub(crate) fn mrt_or_first_antenna(h: &CVector) -> Result<Beamformer> {
    if h.is_zero() {
        let mut e = CVector::zeros(h.len());
        e[0] = C64::new(1.0, 0.0);
        return Beamformer::normalized(e);
    }
    mrt(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::gamma_max;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn instance(m: usize, nb: usize, rng: &mut RngStream) -> (CVector, CMatrix, CVector) {
        let g = (0..m).map(|_| complex_gaussian(rng)).collect();
        let f = CMatrix::from_fn(m, nb, |_, _| complex_gaussian(rng));
        let d = (0..nb).map(|_| complex_gaussian(rng)).collect();
        (g, f, d)
    }

    #[test]
    fn lifted_quadratic_form_is_the_gain() {
        let mut rng = RngStream::new(1, 1);
        let (g, f, d) = instance(5, 3, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let theta = PhaseConfig::wrapped((0..5).map(|i| 0.7 * i as f64 + 0.1));
        let gain = effective_channel(&g, &theta, &f, &d).unwrap().norm_sqr();
        let qf = cost.quadratic_form(&lift(&theta)).unwrap();
        assert!((gain - qf).abs() < 1e-12 * gain.max(1.0));
        let back = unlift(&lift(&theta)).unwrap();
        for (a, b) in back.angles().iter().zip(theta.angles()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cost_matrix_without_reflection() {
        let d = CVector::from_vec(vec![c(1., 1.), c(0., 2.)]);
        let cost = build_cost_matrix(&CVector::zeros(3), &CMatrix::zeros(3, 2), &d).unwrap();
        let cm = cost.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == 3 && j == 3 {
                    c(6.0, 0.0)
                } else {
                    c(0.0, 0.0)
                };
                assert!((cm[(i, j)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cost_matrix_blocks() {
        let mut rng = RngStream::new(2, 0);
        let (g, f, d) = instance(4, 3, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let chi = CMatrix::from_fn(4, 3, |i, j| g[i] * f[(i, j)]);
        let b = CMatrix::from_fn(5, 3, |i, j| if i < 4 { chi[(i, j)] } else { d[j] });
        let oracle = b.matmul(&b.adjoint()).unwrap();
        assert!(cost.matrix().sub(&oracle).unwrap().frobenius_norm() < 1e-12);
        assert!(cost.matrix().is_hermitian());
        assert!((cost.matrix()[(4, 4)].re - d.norm_sqr()).abs() < 1e-12);
        // off-diagonal block χ d*
        for i in 0..4 {
            let v: C64 = (0..3).map(|n| chi[(i, n)] * d[n].conj()).sum();
            assert!((cost.matrix()[(i, 4)] - v).norm() < 1e-12);
        }
    }

    #[test]
    fn single_antenna_cost_is_rank_one() {
        let mut rng = RngStream::new(3, 0);
        let (g, f, d) = instance(2, 1, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let eig = hermitian_eig(cost.matrix()).unwrap();
        assert_eq!(eig.values.len(), 3);
        assert!(eig.values[1].abs() < 1e-12 && eig.values[2].abs() < 1e-12);
    }

    #[test]
    fn cost_matrix_rejects_bad_input() {
        let indefinite = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            CostMatrix::new(indefinite),
            Err(Error::NotPsd { .. })
        ));
        let skew = CMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            CostMatrix::new(skew),
            Err(Error::NotHermitian { .. })
        ));
        assert!(build_cost_matrix(
            &CVector::zeros(2),
            &CMatrix::zeros(3, 1),
            &CVector::zeros(1)
        )
        .is_err());
    }

    #[test]
    fn identity_cost_gives_trace_n() {
        let cost = CostMatrix::new(CMatrix::identity(4)).unwrap();
        let sol = solve_diag_sdp(&cost, &SdrSettings::default()).unwrap();
        assert!((sol.objective - 4.0).abs() < 1e-12);
        assert!(sol.converged);
    }

    #[test]
    fn two_by_two_closed_form() {
        for cval in [c(0.3, -0.4), c(0.6, 0.8), c(0.0, 0.01)] {
            let cm = CMatrix::from_row_major(2, 2, vec![c(1., 0.), cval, cval.conj(), c(1., 0.)])
                .unwrap();
            let sol =
                solve_diag_sdp(&CostMatrix::new(cm).unwrap(), &SdrSettings::default()).unwrap();
            let expect = 2.0 + 2.0 * cval.norm();
            assert!(
                (sol.objective - expect).abs() < 1e-8,
                "{} vs {expect}",
                sol.objective
            );
        }
    }

    #[test]
    fn factored_and_dense_sweeps_agree() {
        let mut rng = RngStream::new(4, 0);
        let (g, f, d) = instance(6, 2, &mut rng);
        let factored = build_cost_matrix(&g, &f, &d).unwrap();
        let dense = CostMatrix::new(factored.matrix().clone()).unwrap();
        let s = SdrSettings {
            max_sweeps: 7,
            tolerance: 0.0,
            ..Default::default()
        };
        let a = solve_diag_sdp(&factored, &s).unwrap();
        let b = solve_diag_sdp(&dense, &s).unwrap();
        for (x, y) in a.history.iter().zip(&b.history) {
            assert!((x - y).abs() < 1e-9 * x.abs());
        }
    }

    #[test]
    fn solution_is_feasible_and_monotone() {
        let mut rng = RngStream::new(5, 0);
        let (g, f, d) = instance(8, 3, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let sol = solve_diag_sdp(&cost, &SdrSettings::default()).unwrap();
        let v = sol.factor.covariance();
        for i in 0..v.rows() {
            assert!((v[(i, i)].re - 1.0).abs() < 1e-9);
        }
        let eig = hermitian_eig(&v).unwrap();
        assert!(*eig.values.last().unwrap() >= -1e-9);
        for w in sol.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * w[0].abs());
        }
        let trace: f64 = cost.matrix().matmul(&v).unwrap().trace().re;
        assert!((trace - sol.objective).abs() < 1e-9 * trace);
    }

    #[test]
    fn relaxation_dominates_phase_grid() {
        let mut rng = RngStream::new(6, 0);
        let levels: usize = 32;
        let m = 3;
        let (g, f, d) = instance(m, 2, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let sol = solve_diag_sdp(&cost, &SdrSettings::default()).unwrap();
        let mut best = 0.0f64;
        for idx in 0..levels * levels * levels {
            let theta = PhaseConfig::wrapped(
                (0..m)
                    .map(|e| TAU * ((idx / levels.pow(e as u32)) % levels) as f64 / levels as f64),
            );
            best = best.max(effective_channel(&g, &theta, &f, &d).unwrap().norm_sqr());
        }
        assert!(
            sol.objective >= best - 1e-12 * best,
            "{} < {best}",
            sol.objective
        );
    }

    #[test]
    fn rank_one_factor_is_recovered_exactly() {
        let mut rng = RngStream::new(7, 0);
        let (g, f, d) = instance(5, 3, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let v: CVector = (0..6)
            .map(|i| C64::from_polar(1.0, 0.9 * i as f64 - 1.0))
            .collect();
        let y = SdpFactor::from_rows(CMatrix::from_fn(6, 1, |i, _| v[i])).unwrap();
        let (phases, gain) = randomize_extract(&y, &g, &f, &d, 3, &mut rng).unwrap();
        let expect = cost.quadratic_form(&v).unwrap();
        assert!((gain - expect).abs() < 1e-9 * expect);
        let achieved = effective_channel(&g, &phases, &f, &d).unwrap().norm_sqr();
        assert!((achieved - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn more_draws_never_hurt() {
        let mut rng = RngStream::new(8, 0);
        let (g, f, d) = instance(10, 4, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let sol = solve_diag_sdp(&cost, &SdrSettings::default()).unwrap();
        // same stream prefix: the 1000-draw run sees the 1-draw candidate first
        let (_, one) =
            randomize_extract(&sol.factor, &g, &f, &d, 1, &mut RngStream::new(1, 1)).unwrap();
        let (p, many) =
            randomize_extract(&sol.factor, &g, &f, &d, 1000, &mut RngStream::new(1, 1)).unwrap();
        assert!(many >= one);
        assert!(p.angles().iter().all(|t| (0.0..TAU).contains(t)));
        assert!(p
            .coefficients()
            .iter()
            .all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!(randomize_extract(&sol.factor, &g, &f, &d, 0, &mut rng).is_err());
    }

    #[test]
    fn factor_sampling_matches_eigen_sampling() {
        // v̄ = Y r and v̄ = U Σ^{1/2} r share the covariance V
        let mut rng = RngStream::new(9, 0);
        let (g, f, d) = instance(3, 2, &mut rng);
        let cost = build_cost_matrix(&g, &f, &d).unwrap();
        let sol = solve_diag_sdp(&cost, &SdrSettings::default()).unwrap();
        let v = sol.factor.covariance();
        let eig = hermitian_eig(&v).unwrap();
        let n = v.rows();
        let sqrt_v = CMatrix::from_fn(n, n, |i, k| {
            eig.vectors[(i, k)] * eig.values[k].max(0.0).sqrt()
        });
        let samples = 40_000;
        let mut cov_y = CMatrix::zeros(n, n);
        let mut cov_e = CMatrix::zeros(n, n);
        for _ in 0..samples {
            let ry: CVector = (0..sol.factor.rank())
                .map(|_| complex_gaussian(&mut rng))
                .collect();
            let re: CVector = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
            let a = sol.factor.matrix().mul_vec(&ry).unwrap();
            let b = sqrt_v.mul_vec(&re).unwrap();
            for i in 0..n {
                for j in 0..n {
                    cov_y[(i, j)] += a[i] * a[j].conj() / samples as f64;
                    cov_e[(i, j)] += b[i] * b[j].conj() / samples as f64;
                }
            }
        }
        assert!(cov_y.sub(&v).unwrap().frobenius_norm() < 0.05 * n as f64);
        assert!(cov_e.sub(&v).unwrap().frobenius_norm() < 0.05 * n as f64);
    }

    #[test]
    fn single_phase_alignment_reaches_bound() {
        let mut rng = RngStream::new(10, 0);
        for _ in 0..10 {
            let (g, f, d) = instance(1, 1, &mut rng);
            let ch = ChannelRealization {
                f,
                g: vec![g],
                d: vec![d],
                noise_power_w: 1.0,
            };
            let out = jo_pipeline(&ch, 0, 1.0, &SdrSettings::default(), &mut rng).unwrap();
            let bound = gamma_max(&ch.g[0], &ch.f, &ch.d[0]).unwrap();
            assert!(((out.gain - bound) / bound).abs() < 1e-6);
        }
    }

    #[test]
    fn pipeline_respects_bounds() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..10 {
            let (g, f, d) = instance(12, 4, &mut rng);
            let ch = ChannelRealization {
                f,
                g: vec![g],
                d: vec![d],
                noise_power_w: 0.5,
            };
            let out = jo_pipeline(&ch, 0, 2.0, &SdrSettings::default(), &mut rng).unwrap();
            let bound = gamma_max(&ch.g[0], &ch.f, &ch.d[0]).unwrap();
            assert!(out.gain <= bound + 1e-9);
            assert!(
                out.gain <= out.sdp_objective * (1.0 + 1e-6),
                "{} > {} ({})",
                out.gain,
                out.sdp_objective,
                out.converged
            );
            assert!((out.rate_bpshz - rate_bpshz(out.gain, 2.0, 0.5).unwrap()).abs() < 1e-12);
            assert!(jo_pipeline(&ch, 1, 2.0, &SdrSettings::default(), &mut rng).is_err());
        }
    }
}
