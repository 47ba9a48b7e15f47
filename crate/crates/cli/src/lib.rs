//! Command-line front end: matrix I/O, decompositions, benchmark sweeps,
//! convergence traces, channel assignment and cross-class kernels.
//!
//! All indices written by the tool are 0-based. Matrix files are CSV unless
//! the path ends in `.bin` or `--format bin` is given.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use twsp::io::MatrixFormat;
use twsp::{MatchingTarget, SolverConfig};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "twsp", version, about = "Joint column/row subset selection for CUR decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select columns and rows of a matrix and write the decomposition as JSON.
    Decompose(DecomposeArgs),
    /// Sweep methods and selection sizes over seeded synthetic matrices; CSV out.
    Benchmark(BenchmarkArgs),
    /// Per-iteration solver traces for many seeds; CSV out.
    Convergence(ConvergenceArgs),
    /// Run the solver, then list the top-F channels for each selected sensor row.
    AssignChannels(AssignArgs),
    /// Write the cross-class kernel X2ᵀ X1 (one-versus-all when --class2 repeats).
    Kernel(KernelArgs),
    /// Write a seeded low-rank-plus-noise matrix.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Method {
    Twsp,
    Sp,
    Leverage,
    Random,
    Brute,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Twsp => "twsp",
            Method::Sp => "sp",
            Method::Leverage => "leverage",
            Method::Random => "random",
            Method::Brute => "brute",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Bin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Data,
    Residual,
}

impl From<TargetArg> for MatchingTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Data => MatchingTarget::Data,
            TargetArg::Residual => MatchingTarget::Residual,
        }
    }
}

/// Matrix input options shared by every command that reads files.
#[derive(Clone, Debug, Args)]
pub struct InputArgs {
    /// Input file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Skip one header line in CSV input.
    #[arg(long)]
    pub header: bool,
}

impl InputArgs {
    pub fn format_for(&self, path: &Path) -> MatrixFormat {
        match self.format {
            Some(FormatArg::Csv) => MatrixFormat::Csv,
            Some(FormatArg::Bin) => MatrixFormat::Bin,
            None => MatrixFormat::from_path(path),
        }
    }
}

/// Solver options. Defaults follow [`SolverConfig::new`].
#[derive(Clone, Debug, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub k1: usize,
    #[arg(long)]
    pub k2: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration cap [default: 30·max(k1, k2)].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Relative improvement below which the error counts as saturated.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Saturation window in iterations [default: max(k1, k2)].
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = TargetArg::Residual)]
    pub matching_target: TargetArg,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        self.config_for(self.k1, self.k2, self.seed)
    }

    pub fn config_for(&self, k1: usize, k2: usize, seed: u64) -> SolverConfig {
        let mut cfg = SolverConfig::new(k1, k2)
            .with_seed(seed)
            .with_restarts(self.restarts)
            .with_matching_target(self.matching_target.into());
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if let Some(w) = self.window {
            cfg.saturation_window = w;
        }
        cfg.saturation_tol = self.tol;
        cfg
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = Method::Twsp)]
    pub method: Method,
    /// Target rank of the leverage scores [default: max(k1, k2)].
    #[arg(long)]
    pub leverage_rank: Option<usize>,
    /// Output JSON path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Synthetic matrix shape and noise.
#[derive(Clone, Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 400)]
    pub m: usize,
    #[arg(long, default_value_t = 10)]
    pub rank: usize,
    /// Noise level relative to the low-rank part (Frobenius ratio).
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    #[arg(long, default_value_t = 2)]
    pub k_step: usize,
    /// Seeds 0..seeds; seed s generates matrix s and seeds every method.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Method::Twsp, Method::Sp, Method::Leverage, Method::Random])]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = TargetArg::Residual)]
    pub matching_target: TargetArg,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the selected indices of every row to this CSV file.
    #[arg(long)]
    pub emit_indices: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Input matrix; a synthetic matrix is generated when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Seed of the synthetic matrix.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Solver seeds seed..seed+seeds.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the selection after every iteration to this CSV file.
    #[arg(long)]
    pub emit_selections: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    /// Matrix with sensing locations as rows and channels as columns.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Channels per selected sensor.
    #[arg(long)]
    pub f: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub class1: PathBuf,
    /// Other class; repeat to concatenate several classes (one-versus-all).
    #[arg(long, required = true)]
    pub class2: Vec<PathBuf>,
    #[command(flatten)]
    pub io: InputArgs,
    /// Output matrix; format from its extension.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output matrix; format from its extension.
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Decompose(a) => commands::decompose(&a),
        Command::Benchmark(a) => commands::benchmark(&a),
        Command::Convergence(a) => commands::convergence(&a),
        Command::AssignChannels(a) => commands::assign_channels(&a),
        Command::Kernel(a) => commands::kernel(&a),
        Command::Generate(a) => commands::generate(&a),
    }
}
