use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::output::Format;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Debug, Parser)]
#[command(name = "fim", version, about = "Exact Fisher information of Markov processes and Ising chains")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Global {
    /// Base seed; replica r uses seed + r [default: 20240607]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, written atomically [default: stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file with flag values; flags given on the command line win
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint and conditional Fisher information and the Markov decomposition
    Fisher(FisherArgs),
    /// Monte-Carlo MSE of estimators against Cramér-Rao curves
    Mse(MseArgs),
    /// Sample-mean MSE on the Gaussian Markov chain
    Gaussian(GaussianArgs),
    /// Nearest-neighbour Ising chain thermometry
    Ising(IsingArgs),
    /// Next-nearest-neighbour Ising chain panels
    Nnn(NnnArgs),
    /// Markov order of a finite model or a spin chain
    MarkovOrder(MarkovOrderArgs),
    /// Block entropies, entropy rate and excess entropy
    Entropy(EntropyArgs),
}

/// A finite model: a builtin name or a JSON model file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ModelArgs {
    /// Builtin name (toy-sub, toy-super, iid-bernoulli, two-param, order-two) or path to a JSON model
    #[arg(long)]
    pub model: Option<String>,
    /// Parameter values, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Central,
    Analytic,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FisherArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Window length [default: 8]
    #[arg(long)]
    pub n: Option<usize>,
    /// Derivative scheme [default: central]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    /// Central-difference step [default: 1e-5 max(1, |theta|)]
    #[arg(long)]
    pub step: Option<f64>,
    /// Richardson extrapolation of central differences
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub richardson: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Estimators, comma separated: mle, uncorrelated-mle [default: mle]
    #[arg(long, value_delimiter = ',')]
    pub estimator: Option<Vec<String>>,
    /// Replicas per sample size [default: 50]
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Sample sizes [default: 10 log-spaced points from 100 to 100000]
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct GaussianArgs {
    /// Correlation parameters [default: -0.9,0,0.9]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rho: Option<Vec<f64>>,
    /// Mean, the estimated parameter [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Stationary variance [default: 1]
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Replicas per sample size [default: 1000]
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Sample sizes [default: 10 log-spaced points from 100 to 100000]
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
}

/// Temperature grid: an explicit list, or log-spaced points.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct TempArgs {
    /// Explicit temperatures (overrides the log grid)
    #[arg(long, value_delimiter = ',')]
    pub temps: Option<Vec<f64>>,
    /// Lowest temperature [default: 0.05]
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Highest temperature [default: 10]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of log-spaced temperatures [default: 100]
    #[arg(long)]
    pub t_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum IsingMode {
    /// Thermometry over a (B/J, T) grid
    Map,
    /// Probabilities and information along T at fixed B, J
    Curve,
    /// Temperatures where dP(up)/dT vanishes, per B/J
    ZeroDerivative,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct IsingArgs {
    /// [default: map]
    #[arg(long, value_enum)]
    pub mode: Option<IsingMode>,
    /// Coupling [default: 1, or -1 in zero-derivative mode]
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<f64>,
    /// Field for curve mode [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Field ratios for map and zero-derivative modes [default: -3 to 3 in steps of 0.25]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b_over_j: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub temps: TempArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct NnnArgs {
    /// Field [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Panels J/B [default: 2,-2,0.1,-0.1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub j_over_b: Option<Vec<f64>>,
    /// Ratios J2/J [default: 0 to 1 in steps of 0.1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub temps: TempArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MarkovOrderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Spin-chain couplings J1,J2,...; selects the spin chain instead of --model
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub couplings: Option<Vec<f64>>,
    /// Spin-chain field [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Spin-chain temperature [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Claimed order of a finite model [default: the model's order]
    #[arg(long)]
    pub claimed: Option<usize>,
    /// Longest history compared [default: claimed + 2]
    #[arg(long)]
    pub probe_depth: Option<usize>,
    /// Tolerance on conditional probabilities [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct EntropyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Longest block [default: 8]
    #[arg(long)]
    pub n_max: Option<usize>,
}
