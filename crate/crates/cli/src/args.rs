//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sbrw", version, about = "Simplicial branching random walks, Laplacians and arboreal spectral measures")]
pub struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write a JSON run manifest with input and output digests here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced Betti numbers.
    Betti(BettiArgs),
    /// Spectral gap of the upper Laplacian on cycles.
    Gap(GapArgs),
    /// Hodge decomposition of a form, or the harmonic basis.
    Hodge(HodgeArgs),
    /// Monte Carlo runs of the branching walk; CSV `run,n,cell,sign,D_value`.
    Simulate(SimulateArgs),
    /// Exact heat kernel rows `(n, σ, σ′, value)`.
    HeatKernel(KernelArgs),
    /// Limit kernel by spectral projection.
    Limit(LimitArgs),
    /// First-visit kernel into one target cell.
    FirstVisit(FirstVisitArgs),
    /// Return and first-return generating functions with the identity residual.
    SeriesCheck(SeriesArgs),
    /// Partial sums of the return kernel and their spectral limit.
    Recurrence(RecurrenceArgs),
    /// Spectral measures of regular arboreal complexes.
    #[command(subcommand)]
    Arboreal(ArborealCommand),
    /// Dirichlet problem for the upper Laplacian.
    #[command(subcommand)]
    Dirichlet(DirichletCommand),
    /// Lower walk on top cells.
    #[command(subcommand)]
    Lower(LowerCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ComplexArg {
    /// Complex JSON `{"maximal_faces": [[ids...], ...]}`.
    #[arg(long)]
    pub complex: PathBuf,
}

#[derive(Debug, Args)]
pub struct BettiArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    /// Dimension; all dimensions from -1 to d when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i32>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    /// Dimension; defaults to d - 1.
    #[arg(long)]
    pub k: Option<i32>,
}

#[derive(Debug, Args)]
pub struct HodgeArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    /// Dimension; defaults to d - 1.
    #[arg(long)]
    pub k: Option<i32>,
    /// Form values on canonical k-cells in index order, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    /// Laziness.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    /// Horizon.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, env = "SBRW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Starting cell as a vertex ordering such as `1,0`; first canonical cell when omitted.
    #[arg(long)]
    pub start: Option<String>,
    /// Absorbing cell as a vertex list; repeat for several.
    #[arg(long)]
    pub absorb: Vec<String>,
    /// Track individual particles and their ancestry.
    #[arg(long)]
    pub ancestry: bool,
    /// Cancel opposite-orientation pairs after each step.
    #[arg(long)]
    pub annihilate: bool,
    /// Run the lower walk on top cells.
    #[arg(long, conflicts_with_all = ["absorb", "ancestry", "annihilate"])]
    pub lower: bool,
    /// Abort when a run holds more particles than this.
    #[arg(long, default_value_t = sbrw_core::sbrw::DEFAULT_MAX_PARTICLES)]
    pub max_particles: u64,
    /// Worker threads for the runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    /// Restrict rows to this starting cell (vertex ordering).
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FirstVisitArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    /// Target cell as a vertex ordering.
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Cell as a vertex ordering; first canonical cell when omitted.
    #[arg(long)]
    pub cell: Option<String>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Cell as a vertex ordering; first canonical cell when omitted.
    #[arg(long)]
    pub cell: Option<String>,
}

#[derive(Debug, Args)]
pub struct ArborealParams {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Subcommand)]
pub enum ArborealCommand {
    /// CSV samples `(x, rho)` of the density plus `atom,x,mass` lines.
    Density {
        #[command(flatten)]
        params: ArborealParams,
        /// Number of interior sample points.
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Return-kernel diagonal of a truncation against the measure moments.
    Moments {
        #[command(flatten)]
        params: ArborealParams,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Truncation radius; the smallest exact radius when omitted.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Recurrence or transience with the resolvent integral.
    Classify {
        #[command(flatten)]
        params: ArborealParams,
        /// Laziness for the partial sums of the return kernel.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 400)]
        order: usize,
    },
    /// Coefficients of the generating functions from the functional equation.
    Gfun {
        #[command(flatten)]
        params: ArborealParams,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        order: usize,
        /// Cross-check against a truncation of this radius.
        #[arg(long)]
        radius: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    /// Boundary JSON `{"A": [[cell]...], "f": [{"cell": [...], "sign": 1, "value": v}...]}`.
    #[arg(long)]
    pub boundary: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Subcommand)]
pub enum DirichletCommand {
    /// Solve with the absorbing Green function.
    Solve(DirichletArgs),
    /// Invertibility of the restricted Laplacian and combinatorial criteria.
    Diagnose(DirichletArgs),
}

#[derive(Debug, Args)]
pub struct LowerArgs {
    #[command(flatten)]
    pub input: ComplexArg,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum LowerCommand {
    /// Exact lower heat kernel rows `(n, τ, τ′, value)`.
    Kernel(LowerArgs),
    /// Equivalence with the normalized walk, homology and rate checks.
    Check(LowerArgs),
}
