//! Summary records and trace files.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use saddle_svm::distributed::CommStats;
use saddle_svm::solver::Checkpoint;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One trace row per objective check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub elapsed_ms: f64,
    pub scalars_up: u64,
    pub scalars_down: u64,
    /// Half the hull distance in solver units.
    pub margin: f64,
    /// Protocol traffic in units of `k·d`.
    pub comm_kd: f64,
    pub test_accuracy: Option<f64>,
}

impl TraceRow {
    pub fn new(cp: &Checkpoint, kd: Option<f64>, test_accuracy: Option<f64>) -> Self {
        TraceRow {
            iter: cp.iteration,
            primal: cp.primal,
            dual: cp.dual,
            gap: cp.gap,
            elapsed_ms: cp.elapsed_ms,
            scalars_up: cp.scalars_up,
            scalars_down: cp.scalars_down,
            margin: cp.margin(),
            comm_kd: kd.map_or(0.0, |kd| (cp.scalars_up + cp.scalars_down) as f64 / kd),
            test_accuracy,
        }
    }
}

pub fn write_trace(path: &Path, rows: &[TraceRow], format: Format) -> io::Result<()> {
    let file = File::create(path)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for row in rows {
                w.serialize(row).map_err(io::Error::other)?;
            }
            w.flush()
        }
        Format::Json => {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, rows)?;
            writeln!(file)
        }
    }
}

/// Outcome of one solver run as printed by the CLI. Wall-clock fields are
/// the only ones that differ between identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: &'static str,
    pub mode: String,
    pub n1: usize,
    pub n2: usize,
    pub d: usize,
    pub d_pad: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub beta: f64,
    pub nu: f64,
    /// Hull distance in the units of the input file.
    pub objective: f64,
    /// `½‖X⁺η − X⁻ξ‖²` in solver units.
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub distance: f64,
    pub margin: f64,
    pub b: f64,
    pub iterations: usize,
    pub blocks: usize,
    pub outcome: String,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub comm: Option<CommSummary>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommSummary {
    pub k: usize,
    pub partition: String,
    pub scalars_up: u64,
    pub scalars_down: u64,
    pub checkpoint_up: u64,
    pub checkpoint_down: u64,
    pub rounds: u64,
    pub clip_passes: u64,
    pub messages: u64,
    /// Protocol traffic in units of `k·d`.
    pub comm_kd: f64,
}

impl CommSummary {
    pub fn new(stats: &CommStats, k: usize, d: usize, partition: String) -> Self {
        CommSummary {
            k,
            partition,
            scalars_up: stats.scalars_up,
            scalars_down: stats.scalars_down,
            checkpoint_up: stats.checkpoint_up,
            checkpoint_down: stats.checkpoint_down,
            rounds: stats.rounds,
            clip_passes: stats.clip_passes,
            messages: stats.messages,
            comm_kd: stats.protocol_total() as f64 / (k * d) as f64,
        }
    }
}

/// Result of the Gilbert or Frank–Wolfe reference solvers.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub command: &'static str,
    pub n1: usize,
    pub n2: usize,
    pub d: usize,
    pub nu: Option<f64>,
    pub objective: f64,
    pub half_sq: f64,
    pub distance: f64,
    pub gap_certificate: f64,
    pub iterations: usize,
    pub status: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub objective: f64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub blocks: usize,
    pub outcome: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub command: &'static str,
    pub mode: String,
    pub best_beta: f64,
    pub best: RunSummary,
    pub runs: Vec<SweepRow>,
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
