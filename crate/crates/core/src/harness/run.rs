use rayon::prelude::*;

use crate::channel::{draw_topology, realize_channels};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{empirical_cdf, RngStream};
use crate::schemes::{run_scheme, Scheme, SchemeResult};

/// Streams reserved per trial; stream `trial * STREAMS_PER_TRIAL + purpose`.
const STREAMS_PER_TRIAL: u64 = 8;
const STREAM_CHANNEL: u64 = 0;
const STREAM_JO: u64 = 1;
const STREAM_FDMA: u64 = 2;

fn stream(seed: u64, trial: usize, purpose: u64) -> RngStream {
    RngStream::new(seed, trial as u64 * STREAMS_PER_TRIAL + purpose)
}

/// All scheme outcomes of one trial, in the config's scheme order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub results: Vec<SchemeResult>,
}

#[derive(Debug, Clone)]
pub struct ResultSet {
    pub config: SystemConfig,
    pub trials: Vec<TrialRecord>,
}

/// Empirical CDF of one scheme's sum throughput.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCdf {
    pub scheme: Scheme,
    pub points: Vec<(f64, f64)>,
}

impl ResultSet {
    pub fn schemes(&self) -> &[Scheme] {
        &self.config.schemes
    }

    fn column(&self, scheme: Scheme) -> impl Iterator<Item = &SchemeResult> {
        self.trials
            .iter()
            .flat_map(move |t| t.results.iter().filter(move |r| r.scheme == scheme))
    }

    /// Per-trial sum throughput of a scheme, in trial order.
    pub fn throughputs(&self, scheme: Scheme) -> Vec<f64> {
        self.column(scheme).map(|r| r.sum_throughput_bps).collect()
    }

    pub fn mean_wall_time_s(&self, scheme: Scheme) -> Option<f64> {
        let times: Vec<f64> = self.column(scheme).map(|r| r.wall_time_s).collect();
        (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
    }

    pub fn median_throughput(&self, scheme: Scheme) -> Option<f64> {
        median(&self.throughputs(scheme))
    }

    pub fn cdf(&self, scheme: Scheme) -> Result<SchemeCdf> {
        Ok(SchemeCdf {
            scheme,
            points: empirical_cdf(&self.throughputs(scheme))?,
        })
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Draws the topology and channels of one trial, then runs every enabled
/// scheme on that same realization, one after another.
pub fn run_trial(cfg: &SystemConfig, trial: usize) -> Result<TrialRecord> {
    let mut rng = stream(cfg.seed, trial, STREAM_CHANNEL);
    let geom = draw_topology(cfg, &mut rng);
    let ch = realize_channels(&geom, cfg, &mut rng)?;
    let mut jo_rng = stream(cfg.seed, trial, STREAM_JO);
    let mut fdma_rng = stream(cfg.seed, trial, STREAM_FDMA);
    let results = cfg
        .schemes
        .iter()
        .map(|&s| run_scheme(s, &ch, cfg, &mut jo_rng, &mut fdma_rng))
        .collect::<Result<_>>()?;
    Ok(TrialRecord { trial, results })
}

/// Runs `cfg.trials` trials on the current rayon pool. Output order and
/// throughputs depend only on the config, not on scheduling.
pub fn run_montecarlo(cfg: &SystemConfig) -> Result<ResultSet> {
    cfg.validate()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultSet {
        config: cfg.clone(),
        trials,
    })
}

/// [`run_montecarlo`] on a dedicated pool of `threads` workers.
pub fn run_montecarlo_with_threads(cfg: &SystemConfig, threads: usize) -> Result<ResultSet> {
    if threads == 0 {
        return Err(Error::Config("threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
    pool.install(|| run_montecarlo(cfg))
}

/// Per-scheme CDF tables in scheme order.
pub fn summarize_cdf(results: &ResultSet) -> Result<Vec<SchemeCdf>> {
    if results.trials.is_empty() {
        return Err(Error::arg("summarize_cdf: empty result set"));
    }
    results.schemes().iter().map(|&s| results.cdf(s)).collect()
}
