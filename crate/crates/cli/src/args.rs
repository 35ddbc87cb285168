use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Singular self-similar profiles of fast and logarithmic diffusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the fast-diffusion profile and write a CSV table plus a JSON sidecar.
    SolveFde(SolveFdeArgs),
    /// Solve the logarithmic-diffusion profile and write a CSV table plus a JSON sidecar.
    SolveLde(SolveLdeArgs),
    /// Run the verification suite on a fresh solve or on a previous solve's output.
    Verify(VerifyArgs),
    /// Solve every admissible (m, beta) combination.
    Sweep(SweepArgs),
    /// Compare rescaled profiles against direct solves.
    RescaleCheck(RescaleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Fde,
    Lde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Space dimension (default 3).
    #[arg(long)]
    pub n: Option<u32>,
    /// Diffusion exponent, 0 < m < (n-2)/n (fast diffusion only).
    #[arg(long)]
    pub m: Option<f64>,
    /// Default 1.
    #[arg(long)]
    pub rho1: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Blow-up coefficient at the origin (default 1).
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LogModelArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub rho1: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

impl From<LogModelArgs> for ModelArgs {
    fn from(a: LogModelArgs) -> Self {
        Self { n: a.n, m: None, rho1: a.rho1, beta: a.beta, eta: a.eta }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Picard convergence tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed grid spacing in s = ln r.
    #[arg(long)]
    pub seed_ds: Option<f64>,
    /// Runge-Kutta error tolerance.
    #[arg(long)]
    pub rk_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SampleArgs {
    /// Smallest output radius (default: left end of the solution).
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Largest output radius (default: 1e6).
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of rows (default 1000).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveFdeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
    /// Output CSV; the sidecar goes next to it with a .json extension.
    #[arg(long, default_value = "profile.csv")]
    pub out: PathBuf,
    /// key = value file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveLdeArgs {
    #[command(flatten)]
    pub model: LogModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
    #[arg(long, default_value = "profile.csv")]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
    /// CSV written by solve-fde/solve-lde; parameters come from its sidecar.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Sidecar to use with --in (default: the CSV path with a .json extension).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Comma-separated subset of checks.
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Report destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub rho1: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Comma-separated exponents (fast diffusion only).
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
    #[arg(long, default_value = "sweep")]
    pub out_dir: PathBuf,
    /// Worker threads (capped by SELFSIM_THREADS).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RescaleArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,2")]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}
