use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::grid::GridSpec;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "sublin", version, about = "Sublinear integral equations, embedding constants and maximal operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve u = G(u^q dσ) by monotone iteration.
    Solve(SolveArgs),
    /// Embedding constants and the norms of Gσ that control them.
    Constants(ConstantsArgs),
    /// Fractional, dyadic and measure maximal functions, and the maximal fixed point.
    Maximal(MaximalArgs),
    /// Finite-instance equivalence checks and weak maximum principle checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Min,
    Riesz,
    Ppstar,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    CenteredBalls,
    CenteredCubes,
    Uncentered1d,
    UncenteredApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaximalOp {
    Frac,
    Dyadic,
    Measure,
    FixedPoint,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV path for plot data.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value = "min")]
    pub kernel: KernelArg,
    /// Riesz order, 0 < alpha < n.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Declared weak maximum principle constant for the Riesz kernel.
    #[arg(long)]
    pub h: Option<f64>,
    /// Kernel matrix JSON, for `--kernel matrix`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct IterArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Each cell is split into 2^(n·refinement) quadrature pieces.
    #[arg(long, default_value_t = 3)]
    pub refinement: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Extra half-line evaluation points for the CSV.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// With `--kernel ppstar` on R^2_+: also solve the boundary equation on this many nodes.
    #[arg(long)]
    pub boundary_nodes: Option<usize>,
    #[arg(long, default_value_t = 1e4)]
    pub radius: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub q: f64,
    /// Localization point for the restricted half-line constant.
    #[arg(long)]
    pub a: Option<f64>,
    /// Dirac locations on the half-line; the samples of σ elsewhere.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// Random mixtures added to the Dirac probes.
    #[arg(long, default_value_t = 0)]
    pub mixtures: usize,
    /// Fractional order for the maximal weak-type condition (cell measures on R^n).
    #[arg(long)]
    pub max_alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 3)]
    pub refinement: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct MaximalArgs {
    #[arg(long, value_enum)]
    pub op: MaximalOp,
    /// ν for frac, dyadic and measure; σ for fixed-point.
    #[arg(long)]
    pub measure: PathBuf,
    /// σ for `--op measure`.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Dyadic weights JSON for `--op dyadic`.
    #[arg(long)]
    pub rho: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Refinement of the uncentered approximation.
    #[arg(long, default_value_t = 4)]
    pub approx_refinement: u32,
    /// Query points on the line; the samples of the measure otherwise.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub q: Option<f64>,
    #[command(flatten)]
    pub iter: IterArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Instance JSON, a single object or a list.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    /// Number of random instances drawn from `--seed`.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    /// Points per random instance; cycles through 3, 4, 5 when absent.
    #[arg(long)]
    pub size: Option<usize>,
    /// Exponent for random instances; cycles through 0.3, 0.5, 0.7 when absent.
    #[arg(long)]
    pub q: Option<f64>,
    /// Add the two-point family whose solver converges while the embedding constant blows up.
    #[arg(long)]
    pub negative_controls: bool,
    /// A measure μ for the weak maximum principle and quasi-symmetry checks.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
