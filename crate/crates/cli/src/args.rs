use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "z2band", version, about = "Z2 invariants of time-reversal-invariant band structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check hermiticity, time reversal, the gap and Kramers degeneracy on a grid.
    Validate(ValidateArgs),
    /// Kane–Mele invariant from Pfaffian signs at the fixed points.
    Invariant(InvariantArgs),
    /// Berry curvature and Chern number (2D) or Berry phase (1D) on a grid.
    Berry(BerryArgs),
    /// Partition function table on the bordism decomposition of the torus.
    Tqft(TqftArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ModelSource {
    /// Builtin model: `phase:k=<int>`, `dvec:m=<float>` or `flat`.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Model spec file.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Band {
    /// Every occupied band.
    All,
    /// Lower half of the occupied bands in the model's declared sector.
    LowerHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingAxis {
    AxisX,
    AxisY,
    AxisZ,
}

impl PairingAxis {
    pub fn index(self) -> usize {
        match self {
            Self::AxisX => 0,
            Self::AxisY => 1,
            Self::AxisZ => 2,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PairingArgs {
    /// Axis along which fixed points are paired.
    #[arg(long, value_enum)]
    pub pairing: Option<PairingAxis>,
    /// Split of the four pairs on T^3 into north and south 2-tori (0, 1 or 2).
    #[arg(long)]
    pub grouping: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Grid points per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InvariantArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Momentum space, `t1`..`t3`; defaults to the torus of the model's dimension.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub path_samples: usize,
    #[command(flatten)]
    pub pairing: PairingArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BerryArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Comma-separated points per axis, e.g. `24,24`.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Band::All)]
    pub band: Band,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["signs", "builtin", "model"]))]
pub struct TqftArgs {
    /// Fixed-point signs in lexicographic order, e.g. `-,+` on t1.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
    #[arg(long, conflicts_with = "signs")]
    pub builtin: Option<String>,
    #[arg(long, conflicts_with_all = ["signs", "builtin"])]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub path_samples: usize,
    #[command(flatten)]
    pub pairing: PairingArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}
