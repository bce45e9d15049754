//! The `cfchoice` command-line harness.
//!
//! Four subcommands, all deterministic given `--seed`:
//!
//! - `ewm-example`: the exact worked treatment-choice example (no RNG at
//!   all); exits nonzero if any built-in fraction check fails.
//! - `densities`: per-cell kernel density curves of the true,
//!   interventional, and counterfactual period-1 outcomes, plus scatter
//!   data.
//! - `sweep-kl`: KL divergence of both estimates from the truth over a
//!   `sigma_u` grid.
//! - `variance-table`: seed-averaged variances against analytic targets.
//!
//! Flags override values from `--config <json>`, which override built-in
//! defaults; the effective configuration is echoed into the output
//! directory. CSV files are the authoritative outputs; `--svg` adds small
//! plots.

pub mod config;
mod densities;
mod ewm_example;
mod svg;
mod sweep_kl;
mod variance_table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::distributions::DistributionError;
use crate::forwardsim::ForwardSimError;
use crate::kl::KlError;
use crate::policy::PolicyError;
use crate::scm::ScmError;
use crate::welfare::WelfareError;

pub use config::{DensitiesConfig, GridRange, SweepKlConfig, VarianceTableConfig};
pub use variance_table::{compute as compute_variance_table, VarianceReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scm(#[from] ScmError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Welfare(#[from] WelfareError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    ForwardSim(#[from] ForwardSimError),
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error("built-in checks failed:\n{0}")]
    ChecksFailed(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "cfchoice",
    version,
    about = "Interventional vs counterfactual treatment choice experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV/SVG files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker thread count (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also emit SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce the exact worked treatment-choice example (pure
    /// arithmetic; ignores --seed).
    EwmExample {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Density comparisons across (sigma_u, sigma_mu) cells.
    Densities {
        #[command(flatten)]
        common: CommonArgs,
        /// Units per cell.
        #[arg(long)]
        n: Option<usize>,
        /// Treatment effect.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// KL divergence sweep over sigma_u for several sigma_mu values.
    SweepKl {
        #[command(flatten)]
        common: CommonArgs,
        /// Units per grid point.
        #[arg(long)]
        n: Option<usize>,
        /// Treatment effect (single value; lists go in the config file).
        #[arg(long)]
        delta: Option<f64>,
        /// Neighbor count for the KL estimator.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Seed-averaged variance table with analytic targets.
    VarianceTable {
        #[command(flatten)]
        common: CommonArgs,
        /// Units per repetition.
        #[arg(long)]
        n: Option<usize>,
        /// Treatment effect.
        #[arg(long)]
        delta: Option<f64>,
        /// Number of seed repetitions to average.
        #[arg(long)]
        reps: Option<usize>,
    },
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::EwmExample { common }
            | Command::Densities { common, .. }
            | Command::SweepKl { common, .. }
            | Command::VarianceTable { common, .. } => common,
        }
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    let common = command.common();
    match command {
        Command::EwmExample { .. } => {
            let mut stdout = std::io::stdout().lock();
            ewm_example::execute(&mut stdout)
        }
        Command::Densities { n, delta, .. } => {
            let mut cfg: DensitiesConfig = config::load(common.config.as_deref())?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if let Some(n) = n {
                cfg.n = *n;
            }
            if let Some(delta) = delta {
                cfg.delta = *delta;
            }
            densities::execute(&cfg, &common.out, common.svg)
        }
        Command::SweepKl { n, delta, k, .. } => {
            let mut cfg: SweepKlConfig = config::load(common.config.as_deref())?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if let Some(n) = n {
                cfg.n = *n;
            }
            if let Some(delta) = delta {
                cfg.deltas = vec![*delta];
            }
            if let Some(k) = k {
                cfg.k = *k;
            }
            sweep_kl::execute(&cfg, &common.out, common.svg)
        }
        Command::VarianceTable { n, delta, reps, .. } => {
            let mut cfg: VarianceTableConfig = config::load(common.config.as_deref())?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if let Some(n) = n {
                cfg.n = *n;
            }
            if let Some(delta) = delta {
                cfg.delta = *delta;
            }
            if let Some(reps) = reps {
                cfg.reps = *reps;
            }
            let mut stdout = std::io::stdout().lock();
            variance_table::execute(&cfg, &common.out, &mut stdout)
        }
    }
}

/// Parses arguments from the environment and runs the selected command.
///
/// Internal parallelism (grid points, exhaustive search buckets) uses a
/// dedicated pool when `--threads` is given; results are identical for any
/// thread count.
pub fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command.common().threads {
        Some(threads) if threads > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(&cli.command))
        }
        _ => dispatch(&cli.command),
    }
}
