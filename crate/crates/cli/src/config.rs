use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tractlab_core::Process;

/// Average-case spectra, information complexity and tractability checks for
/// integrated Euler and Wiener processes.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "tractlab", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file, written atomically; standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Leading eigenvalues of the univariate covariance operator.
    Eigen(EigenArgs),
    /// Covariance kernel on the grid i/m, i = 1..m.
    Kernel(KernelArgs),
    /// Information complexity n(ε, d).
    Complexity(ComplexityArgs),
    /// Tractability criteria over a logarithmic grid of d.
    Scan(ScanArgs),
    /// Rank-1/rank-2 approximation bounds and approximation numbers.
    VerifyLemmas(LemmaArgs),
    /// Sample paths of the integrated Wiener process.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EigenArgs {
    #[arg(long)]
    pub process: Process,
    #[arg(long)]
    pub r: u32,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Coarse grid for the Wiener solver (the fine grid is twice as large).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest admissible relative two-grid difference.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct KernelArgs {
    #[arg(long)]
    pub process: Process,
    #[arg(long)]
    pub r: u32,
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub process: Process,
    #[arg(long)]
    pub seq: String,
    /// One or more ε values (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    /// One or more dimensions (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    /// Largest number of products to enumerate.
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: usize,
    /// Exit with status 3 unless every result is certified.
    #[arg(long)]
    pub require_certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NotionArg {
    Spt,
    Pt,
    Qpt,
    Weak,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WienerModeArg {
    Fitted,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub process: Process,
    #[arg(long)]
    pub seq: String,
    #[arg(long, value_enum, default_value_t = NotionArg::All)]
    pub notion: NotionArg,
    /// Largest d, e.g. 1e6; must be an integer up to 1e30.
    #[arg(long, default_value = "1e6")]
    pub dmax: String,
    /// Grid points per decade of d.
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
    /// τ values for the series and polynomial criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub tau: Vec<f64>,
    /// Adds the polynomial criterion d^{−q}(Σλ^τ)^{1/τ}/Σλ for every τ.
    #[arg(long)]
    pub q: Option<f64>,
    /// Adds the general quasi-polynomial criterion with τ = 1 − δ/ln₊d.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Relative tolerance of the sums over k.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = WienerModeArg::Fitted)]
    pub wiener_mode: WienerModeArg,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LemmaArgs {
    /// Largest smoothness for the rank-1/rank-2 checks.
    #[arg(long, default_value_t = 12)]
    pub rmax: u32,
    /// Points of the t grid for the pointwise bounds.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Largest n for approximation numbers.
    #[arg(long, default_value_t = 50)]
    pub count: u32,
    /// Largest order r of I^r for approximation numbers.
    #[arg(long, default_value_t = 6)]
    pub order_max: u32,
    /// Constant of a_n(I) ≤ C/n.
    #[arg(long, default_value_t = std::f64::consts::FRAC_2_PI)]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub r: u32,
    /// Number of equispaced points i/m, i = 1..m.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen(_) => "eigen",
            Command::Kernel(_) => "kernel",
            Command::Complexity(_) => "complexity",
            Command::Scan(_) => "scan",
            Command::VerifyLemmas(_) => "verify-lemmas",
            Command::Simulate(_) => "simulate",
        }
    }
}
