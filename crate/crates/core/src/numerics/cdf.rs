use crate::error::{Error, Result};

/// Empirical CDF of `samples`: values sorted ascending, the i-th (1-based)
/// pair carrying probability `i / n`.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::arg("empirical_cdf: no samples"));
    }
    if let Some(bad) = samples.iter().find(|x| x.is_nan()) {
        return Err(Error::arg(format!("empirical_cdf: sample {bad} is NaN")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect())
}

/// Kolmogorov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let table = empirical_cdf(samples)?;
    let n = table.len() as f64;
    Ok(table
        .iter()
        .enumerate()
        .map(|(i, &(x, p))| {
            let f = cdf(x);
            (p - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max))
}
