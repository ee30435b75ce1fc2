//! Command-line front end for the `distimation` library: parameter sweeps,
//! count-file replay, tomography comparison, cluster-chain sweeps and drift
//! tracking, each writing plot-ready CSV and a JSON summary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentKind, NoiseSpec};
pub use error::{CliError, Result};

use config::{ConfigFile, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "distimate",
    version,
    about = "Bell-diagonal estimation from distillation statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Shots per circuit (per setting for tomography).
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sweep step 0.01 instead of 0.05 unless a step is configured.
    #[arg(long)]
    pub paper_mode: bool,
    /// Use exact outcome probabilities instead of sampled counts.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Werner-state sweep over q1.
    WernerSweep {
        #[command(flatten)]
        common: Common,
    },
    /// Bell-diagonal sweep q = (q1, q2, r, r).
    BdSweep {
        #[command(flatten)]
        common: Common,
    },
    /// Estimates from a counts file with header kind,c00,c11,c10,c01,total.
    Replay {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Tomography and Distimation on the same noisy Bell pair.
    QstCompare {
        #[command(flatten)]
        common: Common,
        /// none | pauli:PX,PY,PZ | bell-diagonal:Q1,Q2,Q3,Q4 | depolarizing:W | amplitude-damping:G
        #[arg(long)]
        noise: Option<NoiseSpec>,
    },
    /// Bell-diagonal sweep with the kept pair made by a measured cluster chain.
    MbqcSweep {
        #[command(flatten)]
        common: Common,
        /// Chain length, 3 to 10.
        #[arg(long)]
        chain: Option<usize>,
    },
    /// Bayesian grid tracking of drifting Pauli rates.
    Track {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<usize>,
        /// Prior forgetting exponent in [0, 1].
        #[arg(long)]
        alpha: Option<f64>,
    },
}

impl Command {
    /// Resolved configuration for this invocation.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let (kind, common) = match self {
            Command::WernerSweep { common } => (ExperimentKind::WernerSweep, common),
            Command::BdSweep { common } => (ExperimentKind::BdSweep, common),
            Command::Replay { common, .. } => (ExperimentKind::Replay, common),
            Command::QstCompare { common, .. } => (ExperimentKind::QstCompare, common),
            Command::MbqcSweep { common, .. } => (ExperimentKind::MbqcSweep, common),
            Command::Track { common, .. } => (ExperimentKind::Track, common),
        };
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut cli = Overrides {
            shots: common.shots,
            seed: common.seed,
            out: common.out.clone(),
            paper_mode: common.paper_mode,
            exact: common.exact,
            ..Overrides::default()
        };
        match self {
            Command::Replay { input, .. } => cli.input = input.clone(),
            Command::QstCompare { noise, .. } => cli.noise = noise.clone(),
            Command::MbqcSweep { chain, .. } => cli.chain = *chain,
            Command::Track { steps, alpha, .. } => {
                cli.steps = *steps;
                cli.alpha = *alpha;
            }
            _ => {}
        }
        ExperimentConfig::resolve(kind, file, cli)
    }
}

/// Resolves the config and runs the experiment.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    experiments::run(&cli.command.config()?)
}
