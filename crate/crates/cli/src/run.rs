//! Command implementations.

use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use saddle_svm::data::{read_libsvm, Label};
use saddle_svm::distributed::{run_simulation_transformed, PartitionScheme};
use saddle_svm::matrix::dot;
use saddle_svm::oracle::{fw_oracle, gilbert_solve, OracleResult};
use saddle_svm::solver::{derive_params, solve_transformed, Checkpoint};
use saddle_svm::{
    apply_transform, Dataset, Error, LabelPolicy, Mode, Solution, SolverConfig, TransformSpec, TransformedData,
};

use crate::report::{
    write_json, write_trace, CommSummary, OracleSummary, RunSummary, SweepRow, SweepSummary, TraceRow,
};
use crate::{Command, DataArgs, OutputArgs, SolverArgs};

/// Exit code and message of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::TrainHm { data, solver, out } => train("train-hm", &data, None, None, &solver, &out),
        Command::TrainNu {
            data,
            nu,
            solver,
            out,
        } => train("train-nu", &data, nu.nu, nu.alpha, &solver, &out),
        Command::Gilbert { data, epsilon, out } => {
            let loaded = Loaded::new(&data)?;
            let start = Instant::now();
            let res = gilbert_solve(&loaded.td, epsilon)?;
            let summary = oracle_summary("gilbert", &loaded, None, &res, start);
            emit("gilbert", &out, &summary, None)
        }
        Command::Oracle {
            data,
            nu,
            tolerance,
            out,
        } => {
            let loaded = Loaded::new(&data)?;
            let cap = match resolve_mode(nu.nu, nu.alpha, &loaded.train)? {
                Mode::HardMargin => None,
                Mode::Nu(v) => Some(v),
            };
            let start = Instant::now();
            let res = fw_oracle(&loaded.td, cap, tolerance)?;
            let summary = oracle_summary("oracle", &loaded, cap, &res, start);
            emit("oracle", &out, &summary, None)
        }
        Command::DistSim {
            data,
            nu,
            solver,
            k,
            partition,
            out,
        } => {
            let loaded = Loaded::new(&data)?;
            let mode = resolve_mode(nu.nu, nu.alpha, &loaded.train)?;
            let config = solver_config(&solver, mode, data.seed, solver.beta);
            let scheme = PartitionScheme::from(partition);
            let (sol, stats) = run_simulation_transformed(&loaded.td, k, &config, scheme)?;
            let kd = (k * loaded.train.dim()) as f64;
            let rows: Vec<TraceRow> = sol.trace.iter().map(|cp| TraceRow::new(cp, Some(kd), None)).collect();
            let mut summary = loaded.summarize("dist-sim", &sol);
            summary.comm = Some(CommSummary::new(&stats, k, loaded.train.dim(), format!("{scheme:?}")));
            emit("dist-sim", &out, &summary, Some(&rows))
        }
        Command::SweepBeta {
            data,
            nu,
            solver,
            betas,
            budget,
            out,
        } => sweep(&data, nu.nu, nu.alpha, &solver, &betas, budget, &out),
    }
}

/// Training data in solver coordinates plus an optional test set.
struct Loaded {
    train: Dataset,
    td: TransformedData,
    test: Option<Vec<(Vec<f64>, Label)>>,
}

impl Loaded {
    fn new(args: &DataArgs) -> Result<Self> {
        let policy = if args.zero_two_negative {
            LabelPolicy::ZeroTwoNegative
        } else {
            LabelPolicy::Strict
        };
        let train = read(&args.input, policy, args.dim)?;
        let td = apply_transform(&train, args.seed)?;
        let test = match &args.test {
            None => None,
            Some(path) => {
                let test = read(path, policy, Some(train.dim()))?;
                if test.dim() > train.dim() {
                    return Err(Error::Config(format!(
                        "test data has {} features but training data only {}; pass --dim {}",
                        test.dim(),
                        train.dim(),
                        test.dim()
                    ))
                    .into());
                }
                Some(transform_points(&test, &td.spec))
            }
        };
        Ok(Loaded { train, td, test })
    }

    fn test_accuracy(&self, w: &[f64], b: f64) -> Option<f64> {
        self.test.as_ref().map(|pts| accuracy(pts, w, b))
    }

    fn summarize(&self, command: &'static str, sol: &Solution) -> RunSummary {
        RunSummary {
            command,
            mode: mode_name(sol.params.mode),
            n1: self.train.n1(),
            n2: self.train.n2(),
            d: self.train.dim(),
            d_pad: self.td.d_pad(),
            seed: sol.spec.seed,
            epsilon: sol.params.epsilon,
            beta: sol.params.beta,
            nu: sol.params.nu,
            objective: sol.distance_original,
            primal: sol.primal,
            dual: sol.dual,
            gap: sol.gap,
            distance: sol.distance,
            margin: sol.margin,
            b: sol.b,
            iterations: sol.iterations,
            blocks: sol.blocks,
            outcome: format!("{:?}", sol.outcome),
            train_accuracy: sol.accuracy(&self.train),
            test_accuracy: self.test_accuracy(&sol.w, sol.b),
            comm: None,
            wall_time_s: sol.wall_time_s,
        }
    }
}

fn read(path: &Path, policy: LabelPolicy, dim: Option<usize>) -> Result<Dataset> {
    read_libsvm(path, policy, dim).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn transform_points(data: &Dataset, spec: &TransformSpec) -> Vec<(Vec<f64>, Label)> {
    data.points()
        .iter()
        .map(|p| (spec.apply(&p.features), p.label))
        .collect()
}

fn accuracy(points: &[(Vec<f64>, Label)], w: &[f64], b: f64) -> f64 {
    let hits = points
        .iter()
        .filter(|(x, label)| {
            let predicted = if dot(w, x) - b >= 0.0 {
                Label::Positive
            } else {
                Label::Negative
            };
            predicted == *label
        })
        .count();
    hits as f64 / points.len() as f64
}

fn mode_name(mode: Mode) -> String {
    match mode {
        Mode::HardMargin => "hard-margin".into(),
        Mode::Nu(_) => "nu".into(),
    }
}

fn resolve_mode(nu: Option<f64>, alpha: Option<f64>, data: &Dataset) -> Result<Mode> {
    Ok(match (nu, alpha) {
        (Some(nu), _) => Mode::Nu(nu),
        (None, Some(alpha)) => Mode::nu_from_alpha(alpha, data.n1(), data.n2())?,
        (None, None) => Mode::HardMargin,
    })
}

fn solver_config(args: &SolverArgs, mode: Mode, seed: u64, beta: f64) -> SolverConfig {
    SolverConfig {
        epsilon: args.epsilon,
        beta,
        mode,
        seed,
        max_blocks: args.max_blocks,
        projection: args.projection.into(),
        stop: args.stop.into(),
    }
}

/// Solves and records test accuracy at every checkpoint.
fn solve_with_trace(loaded: &Loaded, config: &SolverConfig) -> Result<(Solution, Vec<TraceRow>)> {
    let mut rows = Vec::new();
    let sol = solve_transformed(&loaded.td, config, &mut |cp: &Checkpoint, w: &[f64]| {
        rows.push(TraceRow::new(cp, None, loaded.test_accuracy(w, cp.b)));
    })?;
    Ok((sol, rows))
}

fn train(
    command: &'static str,
    data: &DataArgs,
    nu: Option<f64>,
    alpha: Option<f64>,
    solver: &SolverArgs,
    out: &OutputArgs,
) -> Result<()> {
    let loaded = Loaded::new(data)?;
    let mode = resolve_mode(nu, alpha, &loaded.train)?;
    let config = solver_config(solver, mode, data.seed, solver.beta);
    let (sol, rows) = solve_with_trace(&loaded, &config)?;
    emit(command, out, &loaded.summarize(command, &sol), Some(&rows))
}

fn sweep(
    data: &DataArgs,
    nu: Option<f64>,
    alpha: Option<f64>,
    solver: &SolverArgs,
    betas: &[f64],
    budget: Option<usize>,
    out: &OutputArgs,
) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::Config("no beta values given".into()).into());
    }
    let loaded = Loaded::new(data)?;
    let mode = resolve_mode(nu, alpha, &loaded.train)?;
    let mut best: Option<(Solution, Vec<TraceRow>)> = None;
    let mut runs = Vec::new();
    for &beta in betas {
        let mut config = solver_config(solver, mode, data.seed, beta);
        if let Some(budget) = budget {
            let params = derive_params(
                config.epsilon,
                beta,
                mode,
                loaded.td.n1(),
                loaded.td.n2(),
                loaded.td.d_pad(),
                config.projection,
            )?;
            config.max_blocks = (budget / params.block_len).max(1);
        }
        let (sol, rows) = solve_with_trace(&loaded, &config)?;
        runs.push(SweepRow {
            beta,
            objective: sol.distance_original,
            primal: sol.primal,
            dual: sol.dual,
            gap: sol.gap,
            iterations: sol.iterations,
            blocks: sol.blocks,
            outcome: format!("{:?}", sol.outcome),
            wall_time_s: sol.wall_time_s,
        });
        if best.as_ref().is_none_or(|(b, _)| sol.primal < b.primal) {
            best = Some((sol, rows));
        }
    }
    let (sol, rows) = best.expect("at least one beta");
    let summary = SweepSummary {
        command: "sweep-beta",
        mode: mode_name(mode),
        best_beta: sol.params.beta,
        best: loaded.summarize("sweep-beta", &sol),
        runs,
    };
    emit("sweep-beta", out, &summary, Some(&rows))
}

fn oracle_summary(
    command: &'static str,
    loaded: &Loaded,
    nu: Option<f64>,
    res: &OracleResult,
    start: Instant,
) -> OracleSummary {
    OracleSummary {
        command,
        n1: loaded.train.n1(),
        n2: loaded.train.n2(),
        d: loaded.train.dim(),
        nu,
        objective: res.distance / loaded.td.spec.scale,
        half_sq: res.half_sq,
        distance: res.distance,
        gap_certificate: res.gap_certificate,
        iterations: res.iterations,
        status: format!("{:?}", res.status),
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

fn target(explicit: &Option<PathBuf>, dir: &Option<PathBuf>, name: String) -> Option<PathBuf> {
    explicit.clone().or_else(|| dir.as_ref().map(|d| d.join(name)))
}

/// Prints the summary and writes the summary and trace files.
fn emit<T: serde::Serialize>(
    command: &str,
    out: &OutputArgs,
    summary: &T,
    rows: Option<&[TraceRow]>,
) -> Result<()> {
    if let Some(dir) = &out.out_dir {
        fs::create_dir_all(dir)?;
    }
    write_json(&mut io::stdout().lock(), summary)?;
    if let Some(path) = target(&out.output, &out.out_dir, format!("{command}-summary.json")) {
        write_json(&mut create(&path)?, summary)?;
    }
    if let Some(rows) = rows {
        let name = format!("{command}-trace.{}", out.format.extension());
        if let Some(path) = target(&out.trace, &out.out_dir, name) {
            write_trace(&path, rows, out.format)
                .map_err(|e| Failure::from(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}
