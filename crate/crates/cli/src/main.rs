mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saddle_svm::distributed::PartitionScheme;
use saddle_svm::solver::ProjectionRule;
use saddle_svm::StopRule;

use report::Format;

/// Linear SVM training with primal-dual saddle point iterations.
#[derive(Debug, Parser)]
#[command(name = "saddle-svm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hard-margin SVM (closest points of the two convex hulls).
    TrainHm {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// ν-SVM (closest points of the two reduced convex hulls).
    TrainNu {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        nu: NuRequired,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Gilbert's algorithm for the hard-margin hull distance.
    Gilbert {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Certified Frank–Wolfe solve of the (reduced) hull distance.
    Oracle {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        nu: NuOptional,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulated server and `k` clients running the same solver.
    DistSim {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        nu: NuOptional,
        #[command(flatten)]
        solver: SolverArgs,
        /// Number of clients.
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = PartitionArg::RoundRobin)]
        partition: PartitionArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Runs the solver for several β and keeps the smallest primal value.
    SweepBeta {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        nu: NuOptional,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3, 1e-4])]
        betas: Vec<f64>,
        /// Iteration budget per run; by default every run gets the same
        /// number of blocks.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Training data in LIBSVM format.
    #[arg(long)]
    input: PathBuf,
    /// Held-out data in LIBSVM format, scored with the trained hyperplane.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Read labels 0 and 2 as the negative class.
    #[arg(long)]
    zero_two_negative: bool,
    /// Pad features to at least this dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 200)]
    max_blocks: usize,
    #[arg(long, value_enum, default_value_t = StopArg::PrimalChange)]
    stop: StopArg,
    #[arg(long, value_enum, default_value_t = ProjectionArg::Auto)]
    projection: ProjectionArg,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct NuRequired {
    /// Cap on every dual weight.
    #[arg(long)]
    nu: Option<f64>,
    /// Sets ν = 1/(α·min(n1, n2)).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct NuOptional {
    /// Cap on every dual weight (ν-SVM); hard margin when absent.
    #[arg(long)]
    nu: Option<f64>,
    /// Sets ν = 1/(α·min(n1, n2)).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Also write the summary to this file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the per-checkpoint trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for the summary and trace when no explicit path is given.
    #[arg(long, env = "SADDLE_SVM_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StopArg {
    PrimalChange,
    DistanceChange,
    DualityGap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProjectionArg {
    Auto,
    Loop,
    Sorted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PartitionArg {
    RoundRobin,
    Contiguous,
    Shuffled,
}

impl From<StopArg> for StopRule {
    fn from(s: StopArg) -> Self {
        match s {
            StopArg::PrimalChange => StopRule::PrimalChange,
            StopArg::DistanceChange => StopRule::DistanceChange,
            StopArg::DualityGap => StopRule::DualityGap,
        }
    }
}

impl From<ProjectionArg> for ProjectionRule {
    fn from(p: ProjectionArg) -> Self {
        match p {
            ProjectionArg::Auto => ProjectionRule::Auto,
            ProjectionArg::Loop => ProjectionRule::Loop,
            ProjectionArg::Sorted => ProjectionRule::Sorted,
        }
    }
}

impl From<PartitionArg> for PartitionScheme {
    fn from(p: PartitionArg) -> Self {
        match p {
            PartitionArg::RoundRobin => PartitionScheme::RoundRobin,
            PartitionArg::Contiguous => PartitionScheme::Contiguous,
            PartitionArg::Shuffled => PartitionScheme::Shuffled,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
