//! Projections onto the simplex and the capped simplex
//! `{x : Σx = 1, 0 ≤ x_i ≤ ν}`.

use crate::error::{Error, Result};

/// Clip masses at or below this are treated as zero.
pub const CLIP_TOL: f64 = 1e-12;

/// Checks that a cap `nu` admits a probability vector of length `n`.
pub fn check_cap(nu: f64, n: usize) -> Result<()> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Config(format!("nu must lie in (0, 1], got {nu}")));
    }
    if nu * (n as f64) < 1.0 - 1e-12 {
        return Err(Error::Config(format!(
            "nu = {nu} is infeasible for {n} points: need nu >= 1/{n} = {}",
            1.0 / n as f64
        )));
    }
    Ok(())
}

/// Divides by the sum.
pub fn project_simplex_normalize(weights: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return Err(Error::Numerical(format!("cannot normalize weights with sum {sum}")));
    }
    Ok(weights.iter().map(|w| w / sum).collect())
}

/// Excess mass above the cap and total mass strictly below it.
pub(crate) fn clip_mass(x: &[f64], nu: f64) -> (f64, f64) {
    let mut excess = 0.0;
    let mut below = 0.0;
    for &v in x {
        if v > nu {
            excess += v - nu;
        } else if v < nu {
            below += v;
        }
    }
    (excess, below)
}

/// One clamp-and-rescale pass with an already aggregated factor.
pub(crate) fn apply_clip(x: &mut [f64], nu: f64, factor: f64) {
    for v in x {
        if *v >= nu {
            *v = nu;
        } else {
            *v *= factor;
        }
    }
}

/// Repeatedly clamps entries above `nu` and spreads the excess over the
/// entries below it, proportionally to their mass. Returns the projected
/// vector and the number of clamp passes performed.
pub fn project_capped_loop(weights: &[f64], nu: f64) -> Result<(Vec<f64>, usize)> {
    check_cap(nu, weights.len())?;
    let mut x = weights.to_vec();
    let mut passes = 0;
    loop {
        let (excess, below) = clip_mass(&x, nu);
        if excess <= CLIP_TOL {
            return Ok((x, passes));
        }
        if below <= 0.0 {
            // every entry sits at the cap; only possible when nu·n = 1
            x.iter_mut().for_each(|v| *v = nu);
            return Ok((x, passes + 1));
        }
        apply_clip(&mut x, nu, 1.0 + excess / below);
        passes += 1;
    }
}

/// Sort-based projection: find the threshold index in one scan over the
/// sorted weights. Ties are ordered by original index.
pub fn project_capped_sorted(weights: &[f64], nu: f64) -> Result<Vec<f64>> {
    check_cap(nu, weights.len())?;
    let (capped, factor) = sorted_threshold(weights, nu);
    Ok(weights
        .iter()
        .zip(&capped)
        .map(|(&w, &c)| if c { nu } else { w * factor })
        .collect())
}

/// Which entries end at the cap, and the factor applied to the others.
pub(crate) fn sorted_threshold(weights: &[f64], nu: f64) -> (Vec<bool>, f64) {
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| weights[i]).collect();

    // prefix[i] = Σ_{j<i} sorted[j]
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &v in &sorted {
        prefix.push(prefix.last().unwrap() + v);
    }

    // Scan candidate thresholds from the top: entries at positions >= i are
    // capped, the rest are rescaled. Position n means nothing is capped.
    let mut excess = 0.0;
    let mut cut = 0;
    let mut factor = 1.0;
    for i in (1..=n).rev() {
        if i < n {
            excess += sorted[i] - nu;
        }
        let below = prefix[i];
        if excess >= 0.0 && below > 0.0 {
            let f = 1.0 + excess / below;
            if sorted[i - 1] * f < nu {
                cut = i;
                factor = f;
                break;
            }
        }
    }

    let mut capped = vec![true; n];
    for &i in &order[..cut] {
        capped[i] = false;
    }
    (capped, factor)
}
