use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pfcme", version, about = "Powered-Fejér concentrated matrix-exponential distributions")]
pub struct Cli {
    /// Output format for data written to stdout.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Largest accepted index without --allow-large-m.
    #[arg(long, default_value_t = 5000, global = true)]
    pub max_m: usize,

    /// Accept indices above --max-m.
    #[arg(long, global = true)]
    pub allow_large_m: bool,

    /// Timing and progress on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SCV, Erlang ratio and scaling diagnostics for each index.
    Table(MList),
    /// Moment integrals and derived statistics for each index.
    Moments(MList),
    /// Density on a uniform grid.
    Density(DensityArgs),
    /// Independent draws.
    Sample(SampleArgs),
    /// Laplace inversion with the distribution's poles and residues.
    Invert(InvertArgs),
    /// Grid check of the Fejér kernel bounds, as JSON.
    VerifyBounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct MList {
    /// Comma-separated indices, each at least 3.
    #[arg(long = "m-list", visible_alias = "m", value_delimiter = ',', required = true, num_args = 1..)]
    pub m: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub m: usize,
    /// Catalog transform name.
    #[arg(long, conflicts_with = "rational", required_unless_present = "rational")]
    pub transform: Option<String>,
    /// Rational transform, e.g. "num=1; den=1,1" for 1/(s+1).
    #[arg(long)]
    pub rational: Option<String>,
    /// Comma-separated evaluation points.
    #[arg(long = "t", value_delimiter = ',', required = true, num_args = 1.., allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Drop terms whose weight is below this fraction of the largest.
    #[arg(long)]
    pub truncate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub list: MList,
    #[arg(long, default_value_t = pfcme::bounds::DEFAULT_A1)]
    pub a1: f64,
    #[arg(long, default_value_t = pfcme::bounds::DEFAULT_A2)]
    pub a2: f64,
    /// Grid points per region.
    #[arg(long, default_value_t = pfcme::bounds::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
}
