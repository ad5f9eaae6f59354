use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multiris::harness::{
    cdf_from_rows, read_trials_csv, run_montecarlo_with_threads, write_cdf_csv, write_cdf_to,
    write_results, CDF_FILE,
};
use multiris::{Error, Scheme, SystemConfig};

/// Monte-Carlo simulator for RIS-assisted multi-user downlink.
#[derive(Parser)]
#[command(name = "multiris", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte-Carlo experiment and write trials.csv, cdf.csv and manifest.toml.
    Run(RunArgs),
    /// Run the enabled schemes and print mean wall time per trial.
    Bench(RunArgs),
    /// Recompute per-scheme CDF tables from a stored trials.csv.
    Cdf(CdfArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; built-in desk defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Config override `key=value`, applied after the file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Comma-separated scheme list, e.g. `ao,tdma`.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<Scheme>>,
    /// Worker threads; defaults to hardware parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Permit US-JO on more than 256 total RIS elements.
    #[arg(long)]
    allow_full_scale_jo: bool,
}

#[derive(Args)]
struct CdfArgs {
    /// Per-trial CSV written by `run`.
    #[arg(long)]
    input: PathBuf,
    /// Directory for cdf.csv; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = one_line(&e.to_string());
        match e {
            Error::Config(_) => Failure::Config(msg),
            Error::Io { .. } | Error::Format { .. } => Failure::Io(msg),
            _ => Failure::Runtime(msg),
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.split('\n')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

fn load_config(args: &RunArgs) -> Result<SystemConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => SystemConfig::load(path)?,
        None => SystemConfig::desk(),
    };
    for kv in &args.overrides {
        cfg.apply_override(kv)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(schemes) = &args.schemes {
        cfg.schemes = schemes.clone();
    }
    if args.allow_full_scale_jo {
        cfg.allow_full_scale_jo = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn threads(args: &RunArgs) -> usize {
    args.threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let cfg = load_config(args)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let results = run_montecarlo_with_threads(&cfg, threads(args))?;
    let paths = write_results(&results, &out)?;
    println!(
        "{} trials x {} schemes -> {}",
        results.trials.len(),
        cfg.schemes.len(),
        paths.trials.parent().unwrap_or(Path::new(".")).display()
    );
    for s in results.schemes() {
        if let Some(m) = results.median_throughput(*s) {
            println!("{:<9} median {:.6e} bit/s", s.name(), m);
        }
    }
    Ok(())
}

fn cmd_bench(args: &RunArgs) -> Result<(), Failure> {
    let cfg = load_config(args)?;
    let results = run_montecarlo_with_threads(&cfg, threads(args))?;
    if let Some(out) = &args.out {
        write_results(&results, out)?;
    }
    println!(
        "M = {}, N_b = {}, K = {}, trials = {}",
        cfg.total_elements(),
        cfg.bs_antennas,
        cfg.users,
        cfg.trials
    );
    println!("{:<9} {:>14}", "scheme", "mean_ms");
    for s in results.schemes() {
        let t = results.mean_wall_time_s(*s).unwrap_or(f64::NAN);
        println!("{:<9} {:>14.4}", s.name(), t * 1e3);
    }
    Ok(())
}

fn cmd_cdf(args: &CdfArgs) -> Result<(), Failure> {
    let rows = read_trials_csv(&args.input)?;
    let cdfs = cdf_from_rows(&rows)?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let path = dir.join(CDF_FILE);
            write_cdf_csv(&cdfs, &path)?;
            println!("{}", path.display());
        }
        None => {
            write_cdf_to(&cdfs, std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Cdf(a) => cmd_cdf(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("multiris: error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
