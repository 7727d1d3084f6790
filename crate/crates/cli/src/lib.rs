//! `cpt`: changepoint analyses of annual climate series from the command
//! line. Every command writes plain text and CSV files into `--output`;
//! nothing is plotted.

mod commands;
mod input;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use changepoint_core::ar::MeanModelKind;
use changepoint_core::mcpt::{PenaltyKind, SearchMethod};

pub use commands::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Data(#[from] changepoint_core::Error),

    #[error("download of {url} failed: {message}")]
    Download { url: String, message: String },
}

impl CliError {
    /// 2 for bad arguments, 3 for anything that went wrong with the data.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Data(changepoint_core::Error::InvalidParameter(_)) => 2,
            Self::Data(_) | Self::Download { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Data(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "cpt", version, about = "Changepoint detection for climate series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download a known dataset (or copy a local file) into the cache.
    Fetch(FetchArgs),
    /// Seasonal statistics, autocorrelations and a normality check.
    Diagnose(DiagnoseArgs),
    /// At-most-one-changepoint test with optional AR pre-whitening.
    Amoc(AmocArgs),
    /// Multiple changepoints by penalized likelihood or binary segmentation.
    Mcpt(McptArgs),
    /// Simulation study comparing binary segmentation and penalized likelihood.
    Simstudy(SimstudyArgs),
    /// Regenerate the Monte Carlo null tables.
    Nulltab(NulltabArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Known dataset: cet, seaice or atlanta (read from the cache).
    #[arg(long, conflicts_with = "path", required_unless_present = "path")]
    pub dataset: Option<String>,
    /// A `year,value` CSV file.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Inclusive year range START:END.
    #[arg(long)]
    pub years: Option<String>,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long)]
    pub dataset: String,
    /// Download from this URL instead of the built-in one.
    #[arg(long, conflicts_with = "from")]
    pub url: Option<String>,
    /// Copy this local file into the cache instead of downloading.
    #[arg(long)]
    pub from: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Observations per year; above 1 the `--path` CSV holds one row per
    /// observation in time order.
    #[arg(long, default_value_t = 1)]
    pub period: usize,
    /// Reference series (same layout) subtracted from the target.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AmocArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Mean structure: constant or trend.
    #[arg(long, default_value = "constant")]
    pub mean: MeanModelKind,
    /// AR order used for pre-whitening (0 tests the raw series).
    #[arg(long, default_value_t = 1)]
    pub ar: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Directory of null tables written by `cpt nulltab` (default: built in).
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct McptArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "constant")]
    pub mean: MeanModelKind,
    #[arg(long, default_value_t = 1)]
    pub ar: usize,
    /// Penalty: aic, bic, mbic or mdl. Binary segmentation uses it only to
    /// score its result.
    #[arg(long, default_value = "bic")]
    pub penalty: PenaltyKind,
    /// Search method: ga, binseg or exhaustive.
    #[arg(long, default_value = "ga")]
    pub method: SearchMethod,
    /// Test level inside binary segmentation.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimstudyArgs {
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Shift size in noise standard deviations.
    #[arg(long, default_value_t = 1.0)]
    pub shift: f64,
    #[arg(long, default_value_t = 0)]
    pub ar: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct NulltabArgs {
    /// Monte Carlo draws per table.
    #[arg(long, default_value_t = changepoint_core::amoc::null::SHIPPED_DRAWS)]
    pub draws: usize,
    /// Grid points per simulated Brownian path.
    #[arg(long, default_value_t = changepoint_core::amoc::null::SHIPPED_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = changepoint_core::amoc::null::SHIPPED_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
}
