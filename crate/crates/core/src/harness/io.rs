//! CSV and manifest persistence.
//!
//! Floats are written in Rust's shortest round-trip form, so re-reading a
//! file reproduces every throughput bit for bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::{ResultSet, SchemeCdf};
use crate::error::{Error, Result};
use crate::numerics::empirical_cdf;
use crate::schemes::Scheme;

pub const TRIALS_FILE: &str = "trials.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// One line of the per-trial CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub scheme: Scheme,
    pub sum_throughput_bps: f64,
    pub selected_user: Option<usize>,
    pub wall_time_ms: f64,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
struct CdfRow {
    scheme: Scheme,
    throughput_bps: f64,
    probability: f64,
}

#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub trials: PathBuf,
    pub cdf: PathBuf,
    pub manifest: PathBuf,
}

pub fn trial_rows(results: &ResultSet) -> Vec<TrialRow> {
    results
        .trials
        .iter()
        .flat_map(|t| {
            t.results.iter().map(move |r| TrialRow {
                trial: t.trial,
                scheme: r.scheme,
                sum_throughput_bps: r.sum_throughput_bps,
                selected_user: r.selected_user,
                wall_time_ms: r.wall_time_s * 1e3,
                converged: r.converged,
            })
        })
        .collect()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trials_csv(rows: &[TrialRow], path: &Path) -> Result<()> {
    write_csv(path, rows)
}

fn cdf_rows(cdfs: &[SchemeCdf]) -> impl Iterator<Item = CdfRow> + '_ {
    cdfs.iter().flat_map(|c| {
        c.points.iter().map(|&(x, p)| CdfRow {
            scheme: c.scheme,
            throughput_bps: x,
            probability: p,
        })
    })
}

pub fn write_cdf_csv(cdfs: &[SchemeCdf], path: &Path) -> Result<()> {
    write_csv(path, cdf_rows(cdfs))
}

/// Same format as [`write_cdf_csv`], to any writer (e.g. stdout).
pub fn write_cdf_to<W: Write>(cdfs: &[SchemeCdf], writer: W) -> Result<()> {
    let label = Path::new("<output>");
    let mut w = csv::Writer::from_writer(writer);
    for row in cdf_rows(cdfs) {
        w.serialize(row).map_err(|e| csv_err(label, e))?;
    }
    w.flush().map_err(|e| Error::io(label, e))
}

/// Reads a per-trial CSV; an empty file (no data rows) is an error.
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<TrialRow>, _>>()
        .map_err(|e| csv_err(path, e))?;
    if rows.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no trial rows".into(),
        });
    }
    Ok(rows)
}

/// Per-scheme CDFs from stored trial rows, schemes in first-seen order.
pub fn cdf_from_rows(rows: &[TrialRow]) -> Result<Vec<SchemeCdf>> {
    let mut order: Vec<Scheme> = Vec::new();
    for r in rows {
        if !order.contains(&r.scheme) {
            order.push(r.scheme);
        }
    }
    order
        .into_iter()
        .map(|s| {
            let xs: Vec<f64> = rows
                .iter()
                .filter(|r| r.scheme == s)
                .map(|r| r.sum_throughput_bps)
                .collect();
            Ok(SchemeCdf {
                scheme: s,
                points: empirical_cdf(&xs)?,
            })
        })
        .collect()
}

/// Writes `trials.csv`, `cdf.csv` and `manifest.toml` into `dir`,
/// creating it if needed. The manifest is a loadable config file.
pub fn write_results(results: &ResultSet, dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = OutputPaths {
        trials: dir.join(TRIALS_FILE),
        cdf: dir.join(CDF_FILE),
        manifest: dir.join(MANIFEST_FILE),
    };
    let cdfs = super::run::summarize_cdf(results)?;
    let manifest = format!(
        "# multiris {} run manifest; load with --config to reproduce\n{}",
        env!("CARGO_PKG_VERSION"),
        results.config.to_toml_string()?
    );
    write_trials_csv(&trial_rows(results), &paths.trials)?;
    write_cdf_csv(&cdfs, &paths.cdf)?;
    fs::write(&paths.manifest, manifest).map_err(|e| Error::io(&paths.manifest, e))?;
    Ok(paths)
}
