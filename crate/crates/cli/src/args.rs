use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "expander-forge",
    version,
    about = "Exponential sums, Cayley spectra, diameters and Kazhdan intervals for V_0 ⋊ S_n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crosscheck {
    Dense,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the output to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: json]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file supplying defaults for any flag; flags on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Do not store the manifest in the results directory
    #[arg(long)]
    pub no_persist: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for v ∈ V_0 whose support-one sums stay below a threshold
    Certify(CertifyArgs),
    /// Spectrum and spectral gap of Cay(V_0, v^{S_n}) from characters
    Gap(GapArgs),
    /// BFS diameter of V_0 ⋊ S_n under Y = {(1,−1,0,…), (0 1), (0 1 … n−1)}
    Diam(DiamArgs),
    /// Empirical tail of |λ_v(u)| for random v against 4·exp(−ε²n/8)
    Tail(TailArgs),
    /// Non-falsification checks on the group catalog and the switching inequality
    Verify(VerifyArgs),
    /// Kazhdan interval and explicit-vector upper bound for a catalog group
    Kazhdan(KazhdanArgs),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Required bound on max_u |λ_v(u)| [default: 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Number of candidates to try [default: 100]
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Comma-separated entries of v [default: 1,-1,0,…,0]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<i64>>,
    /// Recompute the spectrum with the dense eigensolver and compare
    #[arg(long, value_enum)]
    pub crosscheck: Option<Crosscheck>,
    /// Histogram buckets over [−1, 1] [default: 20]
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DiamArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Comma-separated primes for a batch sweep (overrides --p)
    #[arg(long, value_delimiter = ',')]
    pub ps: Option<Vec<u64>>,
    /// Largest group order explored before the search is truncated
    #[arg(long)]
    pub order_cap: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// [default: 10000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Nonzero frequency u [default: 1]
    #[arg(long)]
    pub u: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run every group of the catalog
    #[arg(long)]
    pub all: bool,
    /// Run a single catalog group
    #[arg(long)]
    pub group: Option<String>,
    /// Run the exhaustive switching-inequality sweep
    #[arg(long)]
    pub switching: bool,
    /// Catalog file [default: the shipped catalog]
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Random vectors per randomized check [default: 1000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Optimizer restarts [default: 20]
    #[arg(long)]
    pub restarts: Option<u64>,
    /// Power k in the check κ(G,S) ≥ κ(G,S^k)/k [default: 2]
    #[arg(long)]
    pub n_power: Option<usize>,
    /// Largest n in the switching sweep [default: 5]
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Primes in the switching sweep [default: 2,3,5]
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct KazhdanArgs {
    #[arg(long)]
    pub group: Option<String>,
    /// Comma-separated generator labels [default: all generators of the group]
    #[arg(long, value_delimiter = ',')]
    pub gens: Option<Vec<String>>,
    /// [default: 20]
    #[arg(long)]
    pub restarts: Option<u64>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}
