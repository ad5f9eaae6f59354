//! Large-scale path loss and thermal noise.

use crate::error::{Error, Result};

fn check_distance(d: f64) -> Result<()> {
    if !(d >= 1.0) {
        return Err(Error::arg(format!(
            "distance {d} m is below the 1 m reference distance"
        )));
    }
    Ok(())
}

/// 3GPP Urban Micro NLOS path gain in dB, `d` in meters and `f_c` in GHz.
pub fn umi_pathloss_db(d: f64, carrier_ghz: f64) -> Result<f64> {
    check_distance(d)?;
    if !(carrier_ghz > 0.0) {
        return Err(Error::arg(format!(
            "carrier {carrier_ghz} GHz must be positive"
        )));
    }
    Ok(-22.7 - 26.0 * carrier_ghz.log10() - 36.7 * d.log10())
}

/// Log-distance LOS path gain in dB: `L0 − 10·α·log10(d)`.
pub fn los_pathloss_db(d: f64, alpha: f64, ref_loss_db: f64) -> Result<f64> {
    check_distance(d)?;
    Ok(ref_loss_db - 10.0 * alpha * d.log10())
}

/// Thermal noise power in watts for a bandwidth, noise density (dBm/Hz) and
/// receiver noise figure (dB).
pub fn noise_power_w(bandwidth_hz: f64, density_dbm_hz: f64, noise_figure_db: f64) -> f64 {
    let dbm = density_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db;
    db_to_linear(dbm - 30.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
