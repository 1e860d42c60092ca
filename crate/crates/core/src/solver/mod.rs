//! Accelerated randomized saddle point solver for
//!
//! ```text
//! max_w  min_{η, ξ}  wᵀX⁺η − wᵀX⁻ξ − ½‖w‖² + γH(η) + γH(ξ)
//! ```
//!
//! with `η, ξ` on simplices (hard margin) or capped simplices (ν-SVM).
//! Every iteration updates one random coordinate of `w` and performs an
//! entropic mirror step on `η` and `ξ`, for `O(n)` work.

mod block;
pub mod objective;
pub mod projection;
mod state;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::matrix::dot;
use crate::preprocess::{apply_transform, TransformSpec, TransformedData};
use crate::rng::{self, Stream};

pub(crate) use block::{combine_log_norms, ordered_sum, DualBlock};
pub use objective::{
    capped_max, capped_min, dual_objective_g, primal_distance, recover_hyperplane, Hyperplane,
};
pub use projection::{project_capped_loop, project_capped_sorted, project_simplex_normalize};
pub use state::{coordinate_step, Evaluation, SaddleState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    HardMargin,
    /// ν-SVM with cap `ν` on every dual weight.
    Nu(f64),
}

impl Mode {
    /// `ν = 1/(α·min(n1, n2))`.
    pub fn nu_from_alpha(alpha: f64, n1: usize, n2: usize) -> Result<Mode> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Mode::Nu(1.0 / (alpha * n1.min(n2) as f64)))
    }

    /// The cap, with `1` standing for "no cap".
    pub fn cap(self) -> f64 {
        match self {
            Mode::HardMargin => 1.0,
            Mode::Nu(nu) => nu,
        }
    }
}

/// How the ν-mode dual step is pulled back onto the capped simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ProjectionRule {
    /// Clamp-and-rescale loop for `ν ≥ 10⁻³`, sorting below.
    #[default]
    Auto,
    Loop,
    Sorted,
}

/// When a run stops, checked once per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StopRule {
    /// The primal objective changed by less than ε since the previous check.
    #[default]
    PrimalChange,
    /// The hull distance in input units, `√(2·primal)/scale`, changed by
    /// less than ε since the previous check.
    DistanceChange,
    /// Certified: `primal − dual ≤ ε·dual` with a positive dual, which
    /// places both values within ε·OPT of the optimum.
    DualityGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub beta: f64,
    pub mode: Mode,
    pub seed: u64,
    pub max_blocks: usize,
    pub projection: ProjectionRule,
    pub stop: StopRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-3,
            beta: 0.1,
            mode: Mode::HardMargin,
            seed: 0,
            max_blocks: 200,
            projection: ProjectionRule::Auto,
            stop: StopRule::PrimalChange,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub epsilon: f64,
    pub beta: f64,
    /// Cap on the dual weights; `1` in hard-margin mode.
    pub nu: f64,
    pub mode: Mode,
    pub gamma: f64,
    pub q: f64,
    pub tau: f64,
    pub sigma: f64,
    pub theta: f64,
    pub d_pad: usize,
    pub n: usize,
    /// Iterations between two objective checks.
    pub block_len: usize,
    /// Resolved rule (never `Auto`).
    pub projection: ProjectionRule,
}

impl SolverParams {
    /// `d/τ`, the weight of the proximal term in the dual step.
    pub fn dual_weight(&self) -> f64 {
        self.d_pad as f64 / self.tau
    }
}

/// `γ = εβ/(2 ln n)`. `n` is real so that tests can use `n = e²`.
pub fn entropy_weight(epsilon: f64, beta: f64, n: f64) -> f64 {
    epsilon * beta / (2.0 * n.ln())
}

/// `(τ, σ, θ)` for dimension `d` and entropy weight `γ`.
pub fn step_sizes(d: usize, gamma: f64, q: f64) -> (f64, f64, f64) {
    let d = d as f64;
    let tau = (d / gamma).sqrt() / (2.0 * q);
    let sigma = (d * gamma).sqrt() / (2.0 * q);
    let theta = 1.0 - 1.0 / (d + q * (d / gamma).sqrt());
    (tau, sigma, theta)
}

/// `⌈d + √(d/(εβ))⌉`.
pub fn block_length(d_pad: usize, epsilon: f64, beta: f64) -> usize {
    let d = d_pad as f64;
    (d + (d / (epsilon * beta)).sqrt()).ceil() as usize
}

pub fn derive_params(
    epsilon: f64,
    beta: f64,
    mode: Mode,
    n1: usize,
    n2: usize,
    d_pad: usize,
    projection: ProjectionRule,
) -> Result<SolverParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Config(format!("beta must lie in (0, 1], got {beta}")));
    }
    if !d_pad.is_power_of_two() {
        return Err(Error::Config(format!("padded dimension {d_pad} is not a power of two")));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::Config("both classes need at least one point".into()));
    }
    let nu = mode.cap();
    if let Mode::Nu(nu) = mode {
        let m = n1.min(n2);
        if !(nu > 0.0 && nu <= 1.0) || nu * (m as f64) < 1.0 - 1e-12 {
            return Err(Error::Config(format!(
                "nu = {nu} is infeasible: it must lie in [1/min(n1, n2), 1] = [{}, 1]",
                1.0 / m as f64
            )));
        }
    }
    let n = n1 + n2;
    let gamma = entropy_weight(epsilon, beta, n as f64);
    let q = (n as f64).ln().sqrt().ceil().max(1.0);
    let (tau, sigma, theta) = step_sizes(d_pad, gamma, q);
    let projection = match projection {
        ProjectionRule::Auto if nu >= 1e-3 => ProjectionRule::Loop,
        ProjectionRule::Auto => ProjectionRule::Sorted,
        rule => rule,
    };
    Ok(SolverParams {
        epsilon,
        beta,
        nu,
        mode,
        gamma,
        q,
        tau,
        sigma,
        theta,
        d_pad,
        n,
        block_len: block_length(d_pad, epsilon, beta),
        projection,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// The primal objective moved by less than ε between two checks.
    Converged,
    /// Stopped by the block budget.
    MaxBlocks,
    /// Hard-margin run whose hulls appear to intersect: the primal went to
    /// (nearly) zero and the dual never became positive.
    NonSeparable,
}

/// One objective check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub b: f64,
    pub elapsed_ms: f64,
    /// Protocol traffic so far; zero for centralized runs.
    pub scalars_up: u64,
    pub scalars_down: u64,
}

impl Checkpoint {
    /// Half the distance between the hulls at this point.
    pub fn margin(&self) -> f64 {
        (2.0 * self.primal).max(0.0).sqrt() / 2.0
    }

    /// Equal iterate values, ignoring the wall clock and traffic counters.
    pub fn same_values(&self, other: &Checkpoint) -> bool {
        let strip = |c: &Checkpoint| Checkpoint {
            elapsed_ms: 0.0,
            scalars_up: 0,
            scalars_down: 0,
            ..*c
        };
        strip(self) == strip(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Direction in transformed coordinates; see [`Solution::decision_value`].
    pub w: Vec<f64>,
    pub b: f64,
    pub eta: Vec<f64>,
    pub xi: Vec<f64>,
    /// `½‖X⁺η − X⁻ξ‖²` in transformed (scaled) coordinates.
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    /// `‖X⁺η − X⁻ξ‖` in transformed coordinates.
    pub distance: f64,
    /// The same distance in the units of the input data.
    pub distance_original: f64,
    /// Half of `distance`.
    pub margin: f64,
    pub iterations: usize,
    pub blocks: usize,
    pub outcome: Outcome,
    pub max_clip_passes: usize,
    pub wall_time_s: f64,
    pub params: SolverParams,
    pub spec: TransformSpec,
    pub trace: Vec<Checkpoint>,
}

impl Solution {
    /// `⟨w, T(x)⟩ − b` where `T` is the training transform.
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        dot(&self.w, &self.spec.apply(x)) - self.b
    }

    pub fn classify(&self, x: &[f64]) -> Label {
        if self.decision_value(x) >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    /// Fraction of correctly classified points.
    pub fn accuracy(&self, data: &Dataset) -> f64 {
        let hits = data
            .points()
            .iter()
            .filter(|p| self.classify(&p.features) == p.label)
            .count();
        hits as f64 / data.len() as f64
    }

    /// Equal in every field except wall-clock measurements.
    pub fn same_values(&self, other: &Solution) -> bool {
        let strip = |s: &Solution| Solution {
            wall_time_s: 0.0,
            trace: Vec::new(),
            ..s.clone()
        };
        strip(self) == strip(other)
            && self.trace.len() == other.trace.len()
            && self.trace.iter().zip(&other.trace).all(|(a, b)| a.same_values(b))
    }
}

/// Applies a [`StopRule`] to the sequence of checks.
#[derive(Debug, Clone)]
pub(crate) struct StopMonitor {
    rule: StopRule,
    epsilon: f64,
    scale: f64,
    last: f64,
}

impl StopMonitor {
    pub fn new(rule: StopRule, epsilon: f64, scale: f64, initial: &Evaluation) -> Self {
        let mut m = StopMonitor {
            rule,
            epsilon,
            scale,
            last: 0.0,
        };
        m.last = m.watched(initial);
        m
    }

    fn watched(&self, eval: &Evaluation) -> f64 {
        match self.rule {
            StopRule::DistanceChange => (2.0 * eval.primal).max(0.0).sqrt() / self.scale,
            _ => eval.primal,
        }
    }

    /// Records a new check and says whether to stop.
    pub fn check(&mut self, eval: &Evaluation) -> bool {
        let value = self.watched(eval);
        let done = match self.rule {
            StopRule::PrimalChange | StopRule::DistanceChange => (value - self.last).abs() < self.epsilon,
            StopRule::DualityGap => eval.dual > 0.0 && eval.primal - eval.dual <= self.epsilon * eval.dual,
        };
        self.last = value;
        done
    }
}

pub(crate) fn final_outcome(converged: bool, mode: Mode, eval: &Evaluation, epsilon: f64) -> Outcome {
    if mode == Mode::HardMargin && eval.dual <= 0.0 && eval.primal < epsilon {
        Outcome::NonSeparable
    } else if converged {
        Outcome::Converged
    } else {
        Outcome::MaxBlocks
    }
}

/// Transforms `data` with the configured seed and solves.
pub fn solve(data: &Dataset, config: &SolverConfig) -> Result<Solution> {
    let td = apply_transform(data, config.seed)?;
    solve_transformed(&td, config, &mut |_, _| {})
}

/// Solves on already transformed data. `observer` sees every checkpoint
/// together with the current `w`.
pub fn solve_transformed(
    data: &TransformedData,
    config: &SolverConfig,
    observer: &mut dyn FnMut(&Checkpoint, &[f64]),
) -> Result<Solution> {
    let params = derive_params(
        config.epsilon,
        config.beta,
        config.mode,
        data.n1(),
        data.n2(),
        data.d_pad(),
        config.projection,
    )?;
    let start = Instant::now();
    let mut rng = rng::stream(config.seed, Stream::Sampling);
    let mut state = SaddleState::new(data.n1(), data.n2(), data.d_pad());

    let mut trace = Vec::new();
    let mut record = |state: &SaddleState, trace: &mut Vec<Checkpoint>| -> Result<Evaluation> {
        let eval = state.evaluate(data, params.nu);
        if !(eval.primal.is_finite() && eval.dual.is_finite()) {
            return Err(Error::Numerical(format!(
                "objective became non-finite at iteration {}",
                state.t
            )));
        }
        let cp = Checkpoint {
            iteration: state.t,
            primal: eval.primal,
            dual: eval.dual,
            gap: eval.primal - eval.dual,
            b: eval.b,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            scalars_up: 0,
            scalars_down: 0,
        };
        observer(&cp, &state.w);
        trace.push(cp);
        Ok(eval)
    };

    let mut eval = record(&state, &mut trace)?;
    let mut stop = StopMonitor::new(config.stop, params.epsilon, data.spec.scale, &eval);
    let mut converged = false;
    let mut blocks = 0;
    while blocks < config.max_blocks {
        for _ in 0..params.block_len {
            state.iterate(data, &params, &mut rng);
        }
        blocks += 1;
        eval = record(&state, &mut trace)?;
        if stop.check(&eval) {
            converged = true;
            break;
        }
    }

    let outcome = final_outcome(converged, params.mode, &eval, params.epsilon);
    let distance = (2.0 * eval.primal).max(0.0).sqrt();
    Ok(Solution {
        w: state.w.clone(),
        b: eval.b,
        eta: state.eta().to_vec(),
        xi: state.xi().to_vec(),
        primal: eval.primal,
        dual: eval.dual,
        gap: eval.primal - eval.dual,
        distance,
        distance_original: distance / data.spec.scale,
        margin: distance / 2.0,
        iterations: state.t,
        blocks,
        outcome,
        max_clip_passes: state.max_clip_passes,
        wall_time_s: start.elapsed().as_secs_f64(),
        params,
        spec: data.spec.clone(),
        trace,
    })
}
