//! Monte-Carlo driver: per-trial draws, paired scheme evaluation, CDF
//! aggregation and persistence.

mod io;
mod run;

pub use io::{
    cdf_from_rows, read_trials_csv, trial_rows, write_cdf_csv, write_cdf_to, write_results,
    write_trials_csv, OutputPaths, TrialRow, CDF_FILE, MANIFEST_FILE, TRIALS_FILE,
};
pub use run::{
    median, run_montecarlo, run_montecarlo_with_threads, run_trial, summarize_cdf, ResultSet,
    SchemeCdf, TrialRecord,
};
