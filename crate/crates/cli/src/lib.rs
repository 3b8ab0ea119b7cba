//! Command-line front end: reads a JSON system file, runs one analysis and
//! writes CSV or JSON.

pub mod commands;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{run, CliError};

/// Environment variable overriding the default enumeration budget.
pub const BUDGET_ENV: &str = "JSC_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "jscc", version, about = "Phase analysis of random joint source-channel codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// System description (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report information quantities in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Enumeration budget; overrides JSC_BUDGET.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase, dominant energies and mutual-information rate of one system.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// `analyze` over a range of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of bsc.p, binary_source.q, ensemble.m, lambda, beta.
        #[arg(long)]
        axis: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Finite-block oracle over random codebooks, compared with the asymptotic rate.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Source block lengths N.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        block_length: Vec<usize>,
        /// Codebooks per block length, seeded `seed, seed + 1, ...`.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        /// Monte Carlo instead of exhaustive enumeration.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Rate/leakage tradeoff, secrecy capacity and equivocation bound.
    Wiretap {
        #[command(flatten)]
        common: Common,
        /// Simplex grid resolution for the input-law search.
        #[arg(long, default_value_t = jscc::apps::DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Points on the tabulated Gamma(R) curve.
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Per-user rates of a two-user multiple-access system.
    Mac {
        #[command(flatten)]
        common: Common,
        /// Block lengths for the exact two-codebook oracle; none skips it.
        #[arg(long, value_delimiter = ',')]
        block_length: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Analyze { common }
            | Command::Sweep { common, .. }
            | Command::Simulate { common, .. }
            | Command::Wiretap { common, .. }
            | Command::Mac { common, .. } => common,
        }
    }
}
