//! Objective values at checkpoints and the final hyperplane.

use crate::matrix::{dot, Matrix};
use crate::preprocess::TransformedData;

/// `min ⟨η, values⟩` over the capped simplex: weight `nu` on the smallest
/// entries, the remainder on the next one. `nu = 1` gives the plain minimum.
pub fn capped_min(values: &[f64], nu: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    weighted_prefix(&sorted, nu)
}

/// Counterpart of [`capped_min`] for the largest entries.
pub fn capped_max(values: &[f64], nu: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    weighted_prefix(&sorted, nu)
}

/// Number of entries that can carry weight under cap `nu`.
pub fn support_size(nu: f64) -> usize {
    (1.0 / nu - 1e-12).ceil().max(1.0) as usize
}

fn weighted_prefix(sorted: &[f64], nu: f64) -> f64 {
    let mut left = 1.0;
    let mut acc = 0.0;
    for &v in sorted.iter().take(support_size(nu)) {
        let w = nu.min(left);
        acc += w * v;
        left -= w;
    }
    acc
}

/// `g(w) = min_η ⟨w, X⁺η⟩ − max_ξ ⟨w, X⁻ξ⟩ − ½‖w‖²` from the inner
/// products `ip_p[i] = ⟨w, X⁺_i⟩` and `ip_m[j] = ⟨w, X⁻_j⟩`.
pub fn dual_from_products(ip_p: &[f64], ip_m: &[f64], w_sq: f64, nu: f64) -> f64 {
    capped_min(ip_p, nu) - capped_max(ip_m, nu) - 0.5 * w_sq
}

/// Dual objective at `w`. Use `nu = 1` for the hard-margin problem.
pub fn dual_objective_g(w: &[f64], data: &TransformedData, nu: f64) -> f64 {
    let ip_p = data.xp.transpose_mul(w);
    let ip_m = data.xm.transpose_mul(w);
    dual_from_products(&ip_p, &ip_m, dot(w, w), nu)
}

/// `X⁺η − X⁻ξ`.
pub fn difference(xp: &Matrix, eta: &[f64], xm: &Matrix, xi: &[f64]) -> Vec<f64> {
    let a = xp.mul(eta);
    let b = xm.mul(xi);
    a.iter().zip(&b).map(|(x, y)| x - y).collect()
}

/// `X⁺η + X⁻ξ`, twice the midpoint of the two closest points.
pub fn midpoint_sum(xp: &Matrix, eta: &[f64], xm: &Matrix, xi: &[f64]) -> Vec<f64> {
    let a = xp.mul(eta);
    let b = xm.mul(xi);
    a.iter().zip(&b).map(|(x, y)| x + y).collect()
}

/// `½‖X⁺η − X⁻ξ‖²`.
pub fn primal_distance(eta: &[f64], xi: &[f64], data: &TransformedData) -> f64 {
    let z = difference(&data.xp, eta, &data.xm, xi);
    0.5 * dot(&z, &z)
}

/// Offset and margin of the separating hyperplane `⟨w, x⟩ = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperplane {
    pub b: f64,
    /// Half the distance between the two (reduced) hulls.
    pub margin: f64,
}

pub fn recover_hyperplane(w: &[f64], eta: &[f64], xi: &[f64], data: &TransformedData) -> Hyperplane {
    let z = difference(&data.xp, eta, &data.xm, xi);
    let p = midpoint_sum(&data.xp, eta, &data.xm, xi);
    hyperplane_from_sums(w, &z, &p)
}

pub(crate) fn hyperplane_from_sums(w: &[f64], z: &[f64], p: &[f64]) -> Hyperplane {
    Hyperplane {
        b: dot(w, p) / 2.0,
        margin: dot(z, z).sqrt() / 2.0,
    }
}
