use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bandedge",
    version,
    about = "Transient probe response of an emitter near a photonic band edge"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write b1, chi and the upper-state population on a time grid.
    Trace(TraceArgs),
    /// Run `trace` over a list of values of one parameter.
    Sweep(SweepArgs),
    /// Cross-check the closed form against the Volterra solver.
    Validate(ValidateArgs),
    /// Print the quintic roots and expansion coefficients as JSON.
    Roots(ParamArgs),
}

/// Physical parameters and grid. Unset flags fall back to the config file,
/// then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Flat key=value file of defaults; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long = "delta-g", allow_hyphen_values = true)]
    pub delta_g: Option<f64>,
    /// Probe Rabi frequency.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long = "chi-prefactor")]
    pub chi_prefactor: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    ClosedForm,
    Volterra,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    InverseSqrt,
    MarkovianFlat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepParam {
    Gamma,
    Delta,
    DeltaG,
    Omega,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Delta => "delta",
            SweepParam::DeltaG => "delta_g",
            SweepParam::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Defaults to the output file extension, else csv.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Output file; stdout when absent.
    #[arg(long = "output", short = 'o')]
    pub output_path: Option<PathBuf>,
    /// Also write a gnuplot script plotting the output file.
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values; may be empty.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub values: String,
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "inverse-sqrt")]
    pub kernel: KernelArg,
    /// Rate of the flat (memoryless) reservoir.
    #[arg(long = "gamma-flat", default_value_t = 1.0)]
    pub gamma_flat: f64,
    /// Time step; overrides --steps.
    #[arg(long)]
    pub step: Option<f64>,
}
