//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

pub const BUDGET_ENV: &str = "RTN_BUDGET_MB";

#[derive(Debug, Parser)]
#[command(name = "rtn", version, about = "Anticoncentration and design diagnostics of random tensor networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form IPRs and Haar references over a grid.
    IprExact(IprExactArgs),
    /// Monte Carlo estimates, histograms and raw overlap samples.
    Sample(SampleArgs),
    /// Exact replica contractions (chain IPR and frame potential, lattice IPR).
    Contract(ContractArgs),
    /// Reference densities, moment tables and KS reports.
    Dist(DistArgs),
    /// Gram, Weingarten or transfer matrix over S_k.
    Matrix(MatrixArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Obc,
    Pbc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Chain,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Ipr,
    Fp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactQuantity {
    /// Exact RMPS IPR for the chosen boundary.
    Ipr,
    /// Leading large-χ correction on top of Haar.
    IprLeading,
    HaarIpr,
    HaarFp,
    /// Random product state IPR (χ is ignored).
    RpsIpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Pt,
    PtFinite,
    Scaling,
    RpsExact,
    RpsLognormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadArg {
    Simpson,
    GaussHermite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKindArg {
    Gram,
    Weingarten,
    Transfer,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IprExactArgs {
    #[arg(long = "grid-N", alias = "grid-n")]
    pub grid_n: String,
    #[arg(long = "grid-chi")]
    pub grid_chi: String,
    #[arg(long = "grid-k", default_value = "2")]
    pub grid_k: String,
    /// Local dimensions.
    #[arg(long, default_value = "2")]
    pub d: String,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "obc")]
    pub boundary: Vec<BoundaryArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ipr")]
    pub quantity: Vec<ExactQuantity>,
    /// Accept bond dimensions that are not powers of d.
    #[arg(long)]
    pub analytic_continuation: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ContractArgs {
    #[arg(long, value_enum, default_value_t = QuantityArg::Ipr)]
    pub quantity: QuantityArg,
    #[arg(long, value_enum, default_value_t = GeometryArg::Chain)]
    pub geometry: GeometryArg,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Obc)]
    pub boundary: BoundaryArg,
    /// Chain lengths (chain geometry).
    #[arg(long = "grid-N", alias = "grid-n")]
    pub grid_n: Option<String>,
    /// Lattice side lengths (square geometry).
    #[arg(long = "grid-L", alias = "grid-l")]
    pub grid_l: Option<String>,
    #[arg(long = "grid-chi")]
    pub grid_chi: String,
    #[arg(long = "grid-k", default_value = "2")]
    pub grid_k: String,
    #[arg(long, default_value = "2")]
    pub d: String,
    #[arg(long = "budget-mem-mb", env = BUDGET_ENV, default_value_t = 2048)]
    pub budget_mem_mb: u64,
    /// Allow two-rail operators at k >= 5.
    #[arg(long)]
    pub allow_large_fp: bool,
    /// Fit the frame-potential constant over the grid.
    #[arg(long = "fit-a")]
    pub fit_a: bool,
    /// Where to write the fit as JSON.
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = QuantityArg::Ipr)]
    pub quantity: QuantityArg,
    #[arg(long, value_enum, default_value_t = GeometryArg::Chain)]
    pub geometry: GeometryArg,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Obc)]
    pub boundary: BoundaryArg,
    #[arg(long = "grid-N", alias = "grid-n")]
    pub grid_n: Option<String>,
    #[arg(long = "grid-L", alias = "grid-l")]
    pub grid_l: Option<String>,
    #[arg(long = "grid-chi")]
    pub grid_chi: String,
    #[arg(long = "grid-k", default_value = "1,2,3")]
    pub grid_k: String,
    #[arg(long, default_value = "2")]
    pub d: String,
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    /// Histogram CSV of w per grid point.
    #[arg(long)]
    pub hist_out: Option<PathBuf>,
    /// Raw ln w dump, one value per line.
    #[arg(long)]
    pub raw_out: Option<PathBuf>,
    /// Compare each histogram with the scaling law (KS distance).
    #[arg(long)]
    pub ks: bool,
    /// Constant a in the frame-potential scaling parameter γ = χ²/(aN).
    #[arg(long, default_value_t = 0.6)]
    pub fp_a: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub hist_lo: f64,
    #[arg(long, default_value_t = 1e2)]
    pub hist_hi: f64,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[arg(long = "budget-mem-mb", env = BUDGET_ENV, default_value_t = 2048)]
    pub budget_mem_mb: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "scaling,pt")]
    pub family: Vec<Family>,
    /// Scaling parameters.
    #[arg(long = "grid-gamma", default_value = "0.5,1,2,4")]
    pub grid_gamma: String,
    /// Site counts of the product-state families.
    #[arg(long = "grid-N", alias = "grid-n", default_value = "15")]
    pub grid_n: String,
    #[arg(long, default_value = "2")]
    pub d: String,
    /// Hilbert-space dimensions of the finite Porter-Thomas law.
    #[arg(long, default_value = "1024")]
    pub dim: String,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub w_min: f64,
    #[arg(long, default_value_t = 1e2)]
    pub w_max: f64,
    /// Moment table up to this order (0 for none).
    #[arg(long, default_value_t = 0)]
    pub moments: usize,
    #[arg(long)]
    pub moments_out: Option<PathBuf>,
    /// Raw ln w dump to test against every family.
    #[arg(long)]
    pub ks_samples: Option<PathBuf>,
    #[arg(long)]
    pub ks_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = QuadArg::Simpson)]
    pub quadrature: QuadArg,
    #[arg(long, default_value_t = 200)]
    pub gh_nodes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long, value_enum, default_value_t = MatrixKindArg::Gram)]
    pub kind: MatrixKindArg,
    #[arg(long)]
    pub k: usize,
    /// Dimension parameter of Gram and Weingarten matrices.
    #[arg(long)]
    pub q: Option<u64>,
    /// Transfer matrix local dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Transfer matrix bond dimension.
    #[arg(long)]
    pub chi: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
