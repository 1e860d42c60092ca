//! Per-class dual state over a set of points.
//!
//! The centralized solver keeps one block per class holding every point; a
//! simulated client keeps one block per class holding its own points. Both
//! run exactly the same arithmetic, and the only cross-block operations
//! (sums of partial δ, clip masses and log-normalizers) are performed by the
//! caller in a fixed order. This is what makes a single-client simulation
//! reproduce the centralized iterates bit for bit.

use crate::matrix::Matrix;

use super::projection;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DualBlock {
    /// `+1` for the positive class, `−1` for the negative class.
    sign: f64,
    pub weights: Vec<f64>,
    pub prev: Vec<f64>,
    pub log_weights: Vec<f64>,
    /// `ip[i] = ⟨w, X_i⟩` for the block's points.
    pub ip: Vec<f64>,
    /// Proposed unnormalized log weights of the current iteration.
    proposal: Vec<f64>,
    /// `exp(proposal − max)` and the shift `max`.
    shifted: Vec<f64>,
    max: f64,
}

impl DualBlock {
    /// Uniform start `1/total` on `len` local points out of `total`.
    pub fn uniform(sign: f64, len: usize, total: usize) -> Self {
        let v = 1.0 / total as f64;
        DualBlock {
            sign,
            weights: vec![v; len],
            prev: vec![v; len],
            log_weights: vec![-(total as f64).ln(); len],
            ip: vec![0.0; len],
            proposal: vec![0.0; len],
            shifted: vec![0.0; len],
            max: f64::NEG_INFINITY,
        }
    }

    /// `⟨row, λ + θ(λ − λ_prev)⟩` over the block's points.
    pub fn delta(&self, row: &[f64], theta: f64) -> f64 {
        let mut acc = 0.0;
        for ((&x, &cur), &prev) in row.iter().zip(&self.weights).zip(&self.prev) {
            acc += x * (cur + theta * (cur - prev));
        }
        acc
    }

    /// Computes the unnormalized log weights of the entropic step for a
    /// change `dw` of coordinate `row` and returns their log-sum-exp
    /// (`−∞` for an empty block).
    ///
    /// The extrapolated point is `w_old + d·dw·e_{i*}`, so its inner products
    /// come from the cache without touching the other coordinates.
    pub fn propose(&mut self, row: &[f64], dw: f64, d: f64, c: f64, gamma: f64) -> f64 {
        let inv = 1.0 / (gamma + c);
        let step = d * dw;
        let mut max = f64::NEG_INFINITY;
        for (((p, &lw), &ip), &x) in self
            .proposal
            .iter_mut()
            .zip(&self.log_weights)
            .zip(&self.ip)
            .zip(row)
        {
            let u = ip + step * x;
            *p = (c * lw - self.sign * u) * inv;
            max = max.max(*p);
        }
        self.max = max;
        if max == f64::NEG_INFINITY {
            return max;
        }
        let mut s = 0.0;
        for (e, &p) in self.shifted.iter_mut().zip(&self.proposal) {
            *e = (p - max).exp();
            s += *e;
        }
        max + s.ln()
    }

    /// Normalizes the proposal by the global `log_z`, rotates the history
    /// and moves the inner-product cache to the new `w`.
    pub fn commit(&mut self, log_z: f64, row: &[f64], dw: f64) {
        std::mem::swap(&mut self.prev, &mut self.weights);
        let factor = (self.max - log_z).exp();
        for (((w, lw), (&p, &e)), (ip, &x)) in self
            .weights
            .iter_mut()
            .zip(self.log_weights.iter_mut())
            .zip(self.proposal.iter().zip(&self.shifted))
            .zip(self.ip.iter_mut().zip(row))
        {
            *lw = p - log_z;
            *w = e * factor;
            *ip += dw * x;
        }
    }

    /// Local excess above `nu` and mass strictly below it.
    pub fn clip_mass(&self, nu: f64) -> (f64, f64) {
        projection::clip_mass(&self.weights, nu)
    }

    /// Clamps to `nu` and rescales the rest by the globally agreed factor.
    pub fn apply_clip(&mut self, nu: f64, factor: f64) {
        let log_nu = nu.ln();
        let log_f = factor.ln();
        for (w, lw) in self.weights.iter_mut().zip(self.log_weights.iter_mut()) {
            if *w >= nu {
                *w = nu;
                *lw = log_nu;
            } else {
                *w *= factor;
                *lw += log_f;
            }
        }
    }

    /// Sort-based capped projection of the whole block.
    pub fn apply_sorted(&mut self, nu: f64) {
        let (capped, factor) = projection::sorted_threshold(&self.weights, nu);
        let log_nu = nu.ln();
        let log_f = factor.ln();
        for ((w, lw), c) in self.weights.iter_mut().zip(self.log_weights.iter_mut()).zip(capped) {
            if c {
                *w = nu;
                *lw = log_nu;
            } else {
                *w *= factor;
                *lw += log_f;
            }
        }
    }

    /// Recomputes the cache from scratch; returns the largest correction.
    pub fn refresh_ip(&mut self, x: &Matrix, w: &[f64]) -> f64 {
        let fresh = x.transpose_mul(w);
        let drift = fresh
            .iter()
            .zip(&self.ip)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.ip = fresh;
        drift
    }
}

/// Sums partial values in the given order, starting from zero.
pub(crate) fn ordered_sum(parts: impl IntoIterator<Item = f64>) -> f64 {
    parts.into_iter().fold(0.0, |acc, v| acc + v)
}

/// Combines local log-sum-exps into the global one. A single finite part is
/// returned unchanged.
pub(crate) fn combine_log_norms(parts: &[f64]) -> f64 {
    let finite: Vec<f64> = parts.iter().copied().filter(|v| v.is_finite()).collect();
    match finite.as_slice() {
        [] => f64::NEG_INFINITY,
        [one] => *one,
        many => {
            let max = many.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            max + many.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
        }
    }
}
