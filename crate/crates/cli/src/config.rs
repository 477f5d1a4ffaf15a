//! Command-line surface. The parsed [`RunConfig`] is embedded verbatim in
//! every report, so everything here derives `Serialize`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Default trial and sample count for Monte Carlo runs.
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "slicelab", version, about = "Gowers norms, slice testers and non-classical polynomials")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Report format; each subcommand has its own default.
    #[arg(long, global = true)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Walsh-Hadamard coefficients of a table.
    Fourier(FourierArgs),
    /// `U_s` norm of a table.
    Gowers(GowersArgs),
    /// Distance between the normalized slice and residue-class indicators.
    DenseModel(DenseModelArgs),
    /// The quadruple linearity test on the slice, with linear decoding.
    TestLinearity(TesterArgs),
    /// The d-Gowers parity test on the slice.
    TestGowers(TesterArgs),
    /// Non-classical polynomial tools.
    Nonclassical(NonclassicalArgs),
    /// Exhaustive invariant suite at small dimensions.
    Selftest,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct FourierArgs {
    /// Table file (`dim=<m>` or `bits=<m>` header).
    #[arg(long)]
    pub input: PathBuf,
    /// Report the weight on levels `<= d` instead of coefficients.
    #[arg(long)]
    pub level_weight: Option<u32>,
    /// Only the k largest coefficients by magnitude.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GowersArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Defaults to exact when within budget, otherwise mc.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub samples: u64,
    #[arg(long, env = "GSL_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DenseModelArgs {
    /// Half the dimension.
    #[arg(long, required_unless_present = "sweep")]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub samples: u64,
    #[arg(long, env = "GSL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated dimensions 2n.
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    pub sweep: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TesterArgs {
    /// Half the dimension; taken from the table when `--input` is given.
    #[arg(long)]
    pub n: Option<u32>,
    /// Test order (test-gowers only; the linearity test is order 2).
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, env = "GSL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// 0/1 table over `{0,1}^{2n}`.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// `linear:S=<mask>[,flip=<rate>]` or `random`; uses `--seed`.
    #[arg(long)]
    pub synthetic: Option<String>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct NonclassicalArgs {
    /// Half the dimension, for `--weight-poly`.
    #[arg(long)]
    pub n: Option<u32>,
    /// Polynomial table: a `dim=` file of dyadic values in `[0, 1)`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `j,d,a`: the polynomial `j(|x| - a)/2^d`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub weight_poly: Option<Vec<i64>>,
    /// Check degree `<= d` of the polynomial.
    #[arg(long)]
    pub verify_degree: Option<u32>,
    /// `<f table> <p table>`: correlation of `(-1)^f` with `e(p)`.
    #[arg(long, num_args = 2, value_names = ["F", "P"])]
    pub correlate: Option<Vec<PathBuf>>,
    /// `slice`, `cube` or `residue:k`.
    #[arg(long, default_value = "slice")]
    pub domain: String,
    /// `d,delta`: residue search for a biased polynomial.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub biased_rank: Option<Vec<f64>>,
}
