//! Iterate state and the single-iteration update.

use rand::Rng;

use crate::matrix::dot;
use crate::preprocess::TransformedData;

use super::block::{combine_log_norms, ordered_sum, DualBlock};
use super::objective::{difference, dual_from_products, hyperplane_from_sums, midpoint_sum};
use super::projection::CLIP_TOL;
use super::{ProjectionRule, SolverParams};

/// New value of the sampled coordinate of `w`: a proximal step on
/// `(δ⁺ − δ⁻)·w_i − w_i²/2` with step `σ`.
#[inline]
pub fn coordinate_step(w_i: f64, delta_pos: f64, delta_neg: f64, sigma: f64) -> f64 {
    (w_i + sigma * (delta_pos - delta_neg)) / (sigma + 1.0)
}

/// Objective values at one point of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub primal: f64,
    pub dual: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleState {
    pub t: usize,
    pub w: Vec<f64>,
    pub(crate) pos: DualBlock,
    pub(crate) neg: DualBlock,
    /// Clamp passes of the most recent capped projection.
    pub last_clip_passes: usize,
    pub max_clip_passes: usize,
    /// Largest cache correction seen at a periodic refresh.
    pub max_cache_drift: f64,
}

impl SaddleState {
    /// `w = 0`, both dual vectors uniform, caches zero.
    pub fn new(n1: usize, n2: usize, d_pad: usize) -> Self {
        SaddleState {
            t: 0,
            w: vec![0.0; d_pad],
            pos: DualBlock::uniform(1.0, n1, n1),
            neg: DualBlock::uniform(-1.0, n2, n2),
            last_clip_passes: 0,
            max_clip_passes: 0,
            max_cache_drift: 0.0,
        }
    }

    pub fn eta(&self) -> &[f64] {
        &self.pos.weights
    }

    pub fn eta_prev(&self) -> &[f64] {
        &self.pos.prev
    }

    pub fn xi(&self) -> &[f64] {
        &self.neg.weights
    }

    pub fn xi_prev(&self) -> &[f64] {
        &self.neg.prev
    }

    pub fn ip_p(&self) -> &[f64] {
        &self.pos.ip
    }

    pub fn ip_m(&self) -> &[f64] {
        &self.neg.ip
    }

    /// One iteration with a freshly sampled coordinate.
    pub fn iterate<R: Rng>(&mut self, data: &TransformedData, params: &SolverParams, rng: &mut R) {
        let i = rng.gen_range(0..params.d_pad);
        self.iterate_at(data, params, i);
    }

    /// One iteration updating coordinate `i` of `w`.
    pub fn iterate_at(&mut self, data: &TransformedData, params: &SolverParams, i: usize) {
        let row_p = data.xp.row(i);
        let row_m = data.xm.row(i);

        let delta_p = ordered_sum([self.pos.delta(row_p, params.theta)]);
        let delta_m = ordered_sum([self.neg.delta(row_m, params.theta)]);
        let old = self.w[i];
        let new = coordinate_step(old, delta_p, delta_m, params.sigma);
        self.w[i] = new;
        let dw = new - old;

        let d = params.d_pad as f64;
        let c = params.dual_weight();
        let lz_p = combine_log_norms(&[self.pos.propose(row_p, dw, d, c, params.gamma)]);
        let lz_m = combine_log_norms(&[self.neg.propose(row_m, dw, d, c, params.gamma)]);
        self.pos.commit(lz_p, row_p, dw);
        self.neg.commit(lz_m, row_m, dw);

        if params.nu < 1.0 {
            let passes = match params.projection {
                ProjectionRule::Sorted => {
                    self.pos.apply_sorted(params.nu);
                    self.neg.apply_sorted(params.nu);
                    0
                }
                _ => self.clip_loop(params.nu),
            };
            self.last_clip_passes = passes;
            self.max_clip_passes = self.max_clip_passes.max(passes);
        }

        self.t += 1;
        if self.t.is_multiple_of(10 * params.d_pad) {
            let a = self.pos.refresh_ip(&data.xp, &self.w);
            let b = self.neg.refresh_ip(&data.xm, &self.w);
            self.max_cache_drift = self.max_cache_drift.max(a).max(b);
        }
    }

    /// Clamp-and-rescale passes on both classes until neither has excess.
    fn clip_loop(&mut self, nu: f64) -> usize {
        let mut passes = 0;
        loop {
            let (sp, op) = self.pos.clip_mass(nu);
            let (sm, om) = self.neg.clip_mass(nu);
            let (sp, op) = (ordered_sum([sp]), ordered_sum([op]));
            let (sm, om) = (ordered_sum([sm]), ordered_sum([om]));
            if sp <= CLIP_TOL && sm <= CLIP_TOL {
                return passes;
            }
            if sp > CLIP_TOL {
                self.pos.apply_clip(nu, 1.0 + sp / op);
            }
            if sm > CLIP_TOL {
                self.neg.apply_clip(nu, 1.0 + sm / om);
            }
            passes += 1;
        }
    }

    /// Primal, dual and offset at the current iterate, with fresh inner
    /// products for the dual.
    pub fn evaluate(&self, data: &TransformedData, nu: f64) -> Evaluation {
        let z = difference(&data.xp, self.eta(), &data.xm, self.xi());
        let p = midpoint_sum(&data.xp, self.eta(), &data.xm, self.xi());
        let ip_p = data.xp.transpose_mul(&self.w);
        let ip_m = data.xm.transpose_mul(&self.w);
        Evaluation {
            primal: 0.5 * dot(&z, &z),
            dual: dual_from_products(&ip_p, &ip_m, dot(&self.w, &self.w), nu),
            b: hyperplane_from_sums(&self.w, &z, &p).b,
        }
    }
}
