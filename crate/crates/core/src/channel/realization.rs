//! Small-scale fading draws on top of the geometry-derived path loss.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::Distribution;

use super::fading::Nakagami;
use super::pathloss::{db_to_linear, los_pathloss_db, umi_pathloss_db};
use super::topology::{Geometry, Point};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, C64};

/// One channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// BS → all elements, `M × N_b`. Row `m` is the element's signature
    /// over the antenna array; surfaces are stacked in order.
    pub f: CMatrix,
    /// Elements → user `k`, length `M` each.
    pub g: Vec<CVector>,
    /// BS → user `k`, length `N_b` each.
    pub d: Vec<CVector>,
    pub noise_power_w: f64,
}

impl ChannelRealization {
    pub fn users(&self) -> usize {
        self.g.len()
    }

    pub fn elements(&self) -> usize {
        self.f.rows()
    }

    pub fn antennas(&self) -> usize {
        self.f.cols()
    }

    /// Checks the internal dimensions agree.
    pub fn check(&self) -> Result<()> {
        if self.g.len() != self.d.len() {
            return Err(Error::dim(format!(
                "{} RIS-user channels but {} direct channels",
                self.g.len(),
                self.d.len()
            )));
        }
        for (k, (g, d)) in self.g.iter().zip(&self.d).enumerate() {
            if g.len() != self.f.rows() || d.len() != self.f.cols() {
                return Err(Error::dim(format!(
                    "user {k}: |g|={} |d|={} against F {}x{}",
                    g.len(),
                    d.len(),
                    self.f.rows(),
                    self.f.cols()
                )));
            }
        }
        Ok(())
    }
}

/// Mean-square spreads `Ω` (linear) of every link class.
#[derive(Debug, Clone)]
pub struct LinkBudget {
    /// Per surface, BS–RIS.
    pub bs_ris: Vec<f64>,
    /// Per user and surface, RIS–user.
    pub ris_user: Vec<Vec<f64>>,
    /// Per user, BS–user.
    pub bs_user: Vec<f64>,
}

impl LinkBudget {
    pub fn new(geom: &Geometry, cfg: &SystemConfig) -> Result<Self> {
        let too_close = |what: &str, d: f64| {
            Error::arg(format!(
                "{what} at {d:.3} m is closer than the 1 m reference distance"
            ))
        };
        let bs_ris = geom
            .surfaces
            .iter()
            .enumerate()
            .map(|(s, p)| {
                let d = p.norm();
                los_pathloss_db(d, cfg.los_exponent, cfg.los_ref_loss_db)
                    .map(db_to_linear)
                    .map_err(|_| too_close(&format!("surface {s}"), d))
            })
            .collect::<Result<_>>()?;
        let mut ris_user = Vec::with_capacity(geom.users.len());
        let mut bs_user = Vec::with_capacity(geom.users.len());
        for (k, u) in geom.users.iter().enumerate() {
            let d = u.distance(&Point::ORIGIN);
            bs_user.push(
                umi_pathloss_db(d, cfg.carrier_ghz)
                    .map(db_to_linear)
                    .map_err(|_| too_close(&format!("user {k}"), d))?,
            );
            ris_user.push(
                geom.surfaces
                    .iter()
                    .enumerate()
                    .map(|(s, p)| {
                        let d = u.distance(p);
                        umi_pathloss_db(d, cfg.carrier_ghz)
                            .map(db_to_linear)
                            .map_err(|_| too_close(&format!("user {k} to surface {s}"), d))
                    })
                    .collect::<Result<_>>()?,
            );
        }
        Ok(LinkBudget {
            bs_ris,
            ris_user,
            bs_user,
        })
    }
}

fn coefficient<R: Rng + ?Sized>(dist: &Nakagami, rng: &mut R) -> C64 {
    let mag = dist.sample(rng);
    C64::from_polar(mag, TAU * rng.random::<f64>())
}

/// Draws `(F, {g_k}, {d_k})` for a fixed geometry. Magnitudes are
/// Nakagami-m with `Ω` equal to the link's linear path gain: UMi for the
/// BS–user and RIS–user links, the LOS law for BS–RIS. Phases are uniform.
pub fn realize_channels<R: Rng + ?Sized>(
    geom: &Geometry,
    cfg: &SystemConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if geom.users.len() != cfg.users || geom.surfaces.len() != cfg.surfaces {
        return Err(Error::dim(format!(
            "geometry has {} users / {} surfaces, config {} / {}",
            geom.users.len(),
            geom.surfaces.len(),
            cfg.users,
            cfg.surfaces
        )));
    }
    let budget = LinkBudget::new(geom, cfg)?;
    let counts = cfg.element_counts();
    let m_total: usize = counts.iter().sum();
    let nb = cfg.bs_antennas;

    let mut f = CMatrix::zeros(m_total, nb);
    let mut row = 0;
    for (s, &n_s) in counts.iter().enumerate() {
        let dist = Nakagami::new(cfg.m_bs_ris, budget.bs_ris[s])?;
        for _ in 0..n_s {
            for z in f.row_mut(row) {
                *z = coefficient(&dist, rng);
            }
            row += 1;
        }
    }

    let mut g = Vec::with_capacity(cfg.users);
    let mut d = Vec::with_capacity(cfg.users);
    for k in 0..cfg.users {
        let mut gk = Vec::with_capacity(m_total);
        for (s, &n_s) in counts.iter().enumerate() {
            let dist = Nakagami::new(cfg.m_ris_user, budget.ris_user[k][s])?;
            gk.extend((0..n_s).map(|_| coefficient(&dist, rng)));
        }
        g.push(CVector::from_vec(gk));
        let dist = Nakagami::new(cfg.m_bs_user, budget.bs_user[k])?;
        d.push((0..nb).map(|_| coefficient(&dist, rng)).collect());
    }

    Ok(ChannelRealization {
        f,
        g,
        d,
        noise_power_w: cfg.noise_power_w(),
    })
}
