//! Scenario configuration and its flat TOML file format.
//!
//! Every key of a config file maps one-to-one onto a field of
//! [`SystemConfig`]. Missing keys take the full-scale defaults of
//! [`SystemConfig::full_scale`]; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::schemes::Scheme;

/// Element count above which US-JO needs `allow_full_scale_jo`.
pub const FULL_SCALE_JO_ELEMENTS: usize = 256;

/// How FDMA picks the user whose AO phases are shared across the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdmaAnchor {
    /// Uniformly drawn per trial from the trial's RNG stream.
    Random,
    /// The user picked by opportunistic selection.
    Selected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// BS antenna count `N_b`.
    pub bs_antennas: usize,
    /// User count `K`.
    pub users: usize,
    /// Surface count `S`.
    pub surfaces: usize,
    /// Elements per surface; a single entry applies to every surface.
    #[serde(deserialize_with = "one_or_many")]
    pub elements_per_surface: Vec<usize>,
    pub tx_power_w: f64,
    pub bandwidth_hz: f64,
    pub noise_density_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub carrier_ghz: f64,
    pub cell_radius_m: f64,
    pub ris_ring_radius_m: f64,
    /// Nakagami shape of the BS–user links.
    pub m_bs_user: f64,
    /// Nakagami shape of the RIS–user links.
    pub m_ris_user: f64,
    /// Nakagami shape of the BS–RIS links.
    pub m_bs_ris: f64,
    /// BS–RIS path loss at 1 m, dB.
    pub los_ref_loss_db: f64,
    /// BS–RIS path-loss exponent.
    pub los_exponent: f64,
    pub trials: usize,
    pub seed: u64,
    pub ao_iterations: usize,
    /// Optional early stop for AO on relative objective improvement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ao_tolerance: Option<f64>,
    /// Burer–Monteiro factor rank; derived from `M` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdr_rank: Option<usize>,
    pub sdr_max_sweeps: usize,
    pub sdr_tolerance: f64,
    pub sdr_randomizations: usize,
    pub fdma_anchor: FdmaAnchor,
    #[serde(deserialize_with = "scheme_list")]
    pub schemes: Vec<Scheme>,
    pub allow_full_scale_jo: bool,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::full_scale()
    }
}

impl SystemConfig {
    /// Full-scale scenario: 8 antennas, 4 users, 4 surfaces of 200 elements.
    pub fn full_scale() -> Self {
        SystemConfig {
            bs_antennas: 8,
            users: 4,
            surfaces: 4,
            elements_per_surface: vec![200],
            tx_power_w: 20.0,
            bandwidth_hz: 10e6,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            carrier_ghz: 2.0,
            cell_radius_m: 300.0,
            ris_ring_radius_m: 90.0,
            m_bs_user: 2.5,
            m_ris_user: 2.5,
            m_bs_ris: 2.5,
            los_ref_loss_db: -30.0,
            los_exponent: 2.0,
            trials: 1000,
            seed: 1,
            ao_iterations: 3,
            ao_tolerance: None,
            sdr_rank: None,
            sdr_max_sweeps: 500,
            sdr_tolerance: 1e-8,
            sdr_randomizations: 1000,
            fdma_anchor: FdmaAnchor::Random,
            schemes: Scheme::ALL.to_vec(),
            allow_full_scale_jo: false,
        }
    }

    /// Laptop-sized scenario: 4 antennas, 4 users, 2 surfaces of 8 elements.
    pub fn desk() -> Self {
        SystemConfig {
            bs_antennas: 4,
            surfaces: 2,
            elements_per_surface: vec![8],
            trials: 500,
            ..Self::full_scale()
        }
    }

    /// Element count of every surface, in surface order.
    pub fn element_counts(&self) -> Vec<usize> {
        if self.elements_per_surface.len() == 1 {
            vec![self.elements_per_surface[0]; self.surfaces]
        } else {
            self.elements_per_surface.clone()
        }
    }

    /// Total reflecting elements `M`.
    pub fn total_elements(&self) -> usize {
        self.element_counts().iter().sum()
    }

    pub fn noise_power_w(&self) -> f64 {
        crate::channel::noise_power_w(
            self.bandwidth_hz,
            self.noise_density_dbm_hz,
            self.noise_figure_db,
        )
    }

    pub fn sdr_settings(&self) -> crate::sdr::SdrSettings {
        crate::sdr::SdrSettings {
            rank: self.sdr_rank,
            max_sweeps: self.sdr_max_sweeps,
            tolerance: self.sdr_tolerance,
            randomizations: self.sdr_randomizations,
            ..Default::default()
        }
    }

    pub fn ao_settings(&self) -> crate::ao::AoSettings {
        crate::ao::AoSettings {
            iterations: self.ao_iterations,
            tolerance: self.ao_tolerance,
        }
    }

    /// Checks every structural and physical constraint.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("bs_antennas", self.bs_antennas),
            ("users", self.users),
            ("surfaces", self.surfaces),
            ("trials", self.trials),
            ("ao_iterations", self.ao_iterations),
            ("sdr_max_sweeps", self.sdr_max_sweeps),
            ("sdr_randomizations", self.sdr_randomizations),
        ] {
            if v == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        if self.users > self.bs_antennas {
            return fail(format!(
                "users (K={}) must not exceed bs_antennas (N_b={}): K <= N_b",
                self.users, self.bs_antennas
            ));
        }
        let n = self.elements_per_surface.len();
        if n != 1 && n != self.surfaces {
            return fail(format!(
                "elements_per_surface lists {n} counts for {} surfaces",
                self.surfaces
            ));
        }
        if self.elements_per_surface.contains(&0) {
            return fail("elements_per_surface entries must be at least 1".into());
        }
        for (name, v) in [
            ("tx_power_w", self.tx_power_w),
            ("bandwidth_hz", self.bandwidth_hz),
            ("carrier_ghz", self.carrier_ghz),
            ("cell_radius_m", self.cell_radius_m),
            ("ris_ring_radius_m", self.ris_ring_radius_m),
            ("m_bs_user", self.m_bs_user),
            ("m_ris_user", self.m_ris_user),
            ("m_bs_ris", self.m_bs_ris),
            ("sdr_tolerance", self.sdr_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("noise_density_dbm_hz", self.noise_density_dbm_hz),
            ("noise_figure_db", self.noise_figure_db),
            ("los_ref_loss_db", self.los_ref_loss_db),
            ("los_exponent", self.los_exponent),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite, got {v}"));
            }
        }
        if self.ris_ring_radius_m < 1.0 {
            return fail("ris_ring_radius_m must be at least 1 m".into());
        }
        if self.cell_radius_m <= 1.0 {
            return fail("cell_radius_m must exceed 1 m".into());
        }
        if let Some(t) = self.ao_tolerance {
            if !(t > 0.0) {
                return fail(format!("ao_tolerance must be positive, got {t}"));
            }
        }
        if self.sdr_rank == Some(0) {
            return fail("sdr_rank must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return fail("schemes must enable at least one scheme".into());
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return fail(format!("scheme {s} listed twice"));
            }
        }
        if self.seed > i64::MAX as u64 {
            return fail(format!("seed must not exceed {}", i64::MAX));
        }
        let m = self.total_elements();
        if self.schemes.contains(&Scheme::UsJo)
            && m > FULL_SCALE_JO_ELEMENTS
            && !self.allow_full_scale_jo
        {
            return fail(format!(
                "us-jo with M={m} elements exceeds {FULL_SCALE_JO_ELEMENTS}; \
                 set allow_full_scale_jo or disable us-jo"
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().trim().to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file. The result is not validated.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message().trim())))
    }

    /// Applies a `key=value` override. The value is parsed as a TOML value,
    /// falling back to a bare string.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        let mut table = toml::Table::try_from(&*self).map_err(|e| Error::Config(e.to_string()))?;
        table.insert(key.to_string(), value);
        *self = table.try_into().map_err(|e: toml::de::Error| {
            Error::Config(format!("--set {key}: {}", e.message().trim()))
        })?;
        Ok(())
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Counts {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match Counts::deserialize(d)? {
        Counts::One(n) => vec![n],
        Counts::Many(v) => v,
    })
}

fn scheme_list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scheme>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Names {
        Joined(String),
        List(Vec<String>),
    }
    let names = match Names::deserialize(d)? {
        Names::Joined(s) => s.split(',').map(str::to_string).collect(),
        Names::List(v) => v,
    };
    names
        .iter()
        .map(|n| n.parse::<Scheme>().map_err(serde::de::Error::custom))
        .collect()
}
