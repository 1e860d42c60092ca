//! Reference solvers for the distance between two (reduced) convex hulls.
//!
//! * [`gilbert_solve`]: Gilbert's algorithm on the Minkowski difference
//!   `conv(A) − conv(B)`, the classical hard-margin baseline.
//! * [`fw_oracle`]: Frank–Wolfe with pairwise (away) steps over simplices or
//!   capped simplices. Each step moves mass between the two coordinates of a
//!   block with the most violated optimality condition, using exact line
//!   search. It terminates on the Frank–Wolfe duality gap, which bounds the
//!   suboptimality of the returned value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::preprocess::TransformedData;
use crate::solver::projection::check_cap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleStatus {
    Converged,
    /// The hulls intersect (distance indistinguishable from zero).
    NonSeparable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub eta: Vec<f64>,
    pub xi: Vec<f64>,
    /// `‖Aη − Bξ‖`.
    pub distance: f64,
    /// `½‖Aη − Bξ‖²`.
    pub half_sq: f64,
    /// Frank–Wolfe gap at the returned point; `half_sq − OPT` is at most this.
    pub gap_certificate: f64,
    pub iterations: usize,
    pub status: OracleStatus,
}

const GILBERT_MAX_ITER: usize = 1_000_000;
const FW_MAX_ITER: usize = 10_000_000;

/// Gilbert's algorithm with exact line search. Stops when
/// `⟨z, z − v⟩ ≤ ε‖z‖²` for the minimizing vertex `v`.
pub fn gilbert_solve(data: &TransformedData, epsilon: f64) -> Result<OracleResult> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let (xp, xm) = (&data.xp, &data.xm);
    let (n1, n2) = (xp.cols(), xm.cols());
    let mut eta = vec![0.0; n1];
    let mut xi = vec![0.0; n2];
    eta[0] = 1.0;
    xi[0] = 1.0;
    let mut z = sub(&xp.column(0), &xm.column(0));
    let scale = xp
        .columns()
        .chain(xm.columns())
        .map(|c| dot(&c, &c))
        .fold(0.0, f64::max)
        .sqrt()
        .max(f64::MIN_POSITIVE);

    let mut iterations = 0;
    loop {
        let zz = dot(&z, &z);
        let ip = xp.transpose_mul(&z);
        let im = xm.transpose_mul(&z);
        let i = argmin(&ip);
        let j = argmax(&im);
        let gap = zz - (ip[i] - im[j]);
        if zz.sqrt() <= 1e-12 * scale || iterations >= GILBERT_MAX_ITER {
            return Ok(finish(eta, xi, &z, gap, iterations, OracleStatus::NonSeparable));
        }
        if gap <= epsilon * zz {
            return Ok(finish(eta, xi, &z, gap, iterations, OracleStatus::Converged));
        }
        let v = sub(&xp.column(i), &xm.column(j));
        let dir = sub(&z, &v);
        let t = (gap / dot(&dir, &dir)).clamp(0.0, 1.0);
        for (zk, dk) in z.iter_mut().zip(&dir) {
            *zk -= t * dk;
        }
        eta.iter_mut().for_each(|e| *e *= 1.0 - t);
        xi.iter_mut().for_each(|e| *e *= 1.0 - t);
        eta[i] += t;
        xi[j] += t;
        iterations += 1;
    }
}

/// Certified minimizer of `½‖Aη − Bξ‖²` over simplices (`nu = None`) or
/// `ν`-capped simplices.
pub fn fw_oracle(data: &TransformedData, nu: Option<f64>, tolerance: f64) -> Result<OracleResult> {
    let (n1, n2) = (data.n1(), data.n2());
    fw_oracle_from(data, nu, tolerance, vec![1.0 / n1 as f64; n1], vec![1.0 / n2 as f64; n2])
}

/// [`fw_oracle`] from a given feasible start.
pub fn fw_oracle_from(
    data: &TransformedData,
    nu: Option<f64>,
    tolerance: f64,
    eta: Vec<f64>,
    xi: Vec<f64>,
) -> Result<OracleResult> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Config(format!("tolerance must be positive, got {tolerance}")));
    }
    let cap = nu.unwrap_or(1.0);
    check_cap(cap, data.n1())?;
    check_cap(cap, data.n2())?;
    for (name, v) in [("eta", &eta), ("xi", &xi)] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || v.iter().any(|&x| x < 0.0 || x > cap + 1e-12) {
            return Err(Error::Config(format!("start {name} is not in the feasible set")));
        }
    }
    Pairwise::new(data, cap, eta, xi).run(tolerance)
}

/// State of the pairwise Frank–Wolfe iteration. The second class is
/// handled by negating its points, so both blocks minimize `½‖Xλ‖²`-type
/// terms with the same code.
struct Pairwise<'a> {
    xp: &'a Matrix,
    xm: &'a Matrix,
    cap: f64,
    eta: Vec<f64>,
    xi: Vec<f64>,
    z: Vec<f64>,
    /// Gradients: `gp = X⁺ᵀz`, `gm = −X⁻ᵀz`.
    gp: Vec<f64>,
    gm: Vec<f64>,
    /// Columns, cached for the incremental gradient updates.
    cols_p: Vec<Vec<f64>>,
    cols_m: Vec<Vec<f64>>,
}

impl<'a> Pairwise<'a> {
    fn new(data: &'a TransformedData, cap: f64, eta: Vec<f64>, xi: Vec<f64>) -> Self {
        let mut s = Pairwise {
            xp: &data.xp,
            xm: &data.xm,
            cap,
            eta,
            xi,
            z: Vec::new(),
            gp: Vec::new(),
            gm: Vec::new(),
            cols_p: data.xp.columns().collect(),
            cols_m: data.xm.columns().collect(),
        };
        s.refresh();
        s
    }

    fn refresh(&mut self) {
        self.z = sub(&self.xp.mul(&self.eta), &self.xm.mul(&self.xi));
        self.gp = self.xp.transpose_mul(&self.z);
        self.gm = self.xm.transpose_mul(&self.z).iter().map(|v| -v).collect();
    }

    /// Frank–Wolfe gap `⟨∇, λ − s⟩` with `s` the capped linear minimizer.
    fn gap(&self) -> f64 {
        let block = |g: &[f64], lam: &[f64]| dot(g, lam) - lmo_value(g, self.cap);
        block(&self.gp, &self.eta) + block(&self.gm, &self.xi)
    }

    fn run(mut self, tolerance: f64) -> Result<OracleResult> {
        let mut iterations = 0;
        loop {
            if iterations % 1000 == 0 {
                self.refresh();
            }
            let gap = self.gap();
            if gap <= tolerance {
                // confirm on exact quantities before certifying
                self.refresh();
                let gap = self.gap();
                if gap <= tolerance {
                    // the certified lower bound on the optimum cannot exclude zero
                    let status = if 0.5 * dot(&self.z, &self.z) <= gap {
                        OracleStatus::NonSeparable
                    } else {
                        OracleStatus::Converged
                    };
                    return Ok(finish(self.eta, self.xi, &self.z, gap, iterations, status));
                }
            }
            if iterations >= FW_MAX_ITER {
                return Err(Error::IterationCap {
                    iterations,
                    gap,
                    half_sq: 0.5 * dot(&self.z, &self.z),
                });
            }
            let moved_p = self.pair_step(true);
            let moved_m = self.pair_step(false);
            if !moved_p && !moved_m {
                // no improving pair although the gap is above tolerance:
                // rounding floor reached
                self.refresh();
                let gap = self.gap();
                return Err(Error::IterationCap {
                    iterations,
                    gap,
                    half_sq: 0.5 * dot(&self.z, &self.z),
                });
            }
            iterations += 1;
        }
    }

    /// Moves mass inside one block from the donor with the largest gradient
    /// to the receiver with the smallest, by exact line search.
    fn pair_step(&mut self, positive: bool) -> bool {
        let cap = self.cap;
        let (lam, g, cols) = if positive {
            (&self.eta, &self.gp, &self.cols_p)
        } else {
            (&self.xi, &self.gm, &self.cols_m)
        };
        let mut donor = None;
        let mut receiver = None;
        for (k, (&l, &gk)) in lam.iter().zip(g).enumerate() {
            if l > 0.0 && donor.is_none_or(|d: usize| gk > g[d]) {
                donor = Some(k);
            }
            if l < cap && receiver.is_none_or(|r: usize| gk < g[r]) {
                receiver = Some(k);
            }
        }
        let (Some(i), Some(j)) = (donor, receiver) else {
            return false;
        };
        let slope = g[j] - g[i];
        if i == j || slope >= 0.0 {
            return false;
        }
        // z moves by t·s·(c_j − c_i) with s = +1 for the first class, −1 for the second
        let sgn = if positive { 1.0 } else { -1.0 };
        let dir: Vec<f64> = cols[j].iter().zip(&cols[i]).map(|(a, b)| sgn * (a - b)).collect();
        let curv = dot(&dir, &dir);
        let max_t = lam[i].min(cap - lam[j]);
        let t = if curv > 0.0 { (-slope / curv).min(max_t) } else { max_t };
        if t <= 0.0 {
            return false;
        }
        let lam = if positive { &mut self.eta } else { &mut self.xi };
        if t == lam[i] {
            lam[i] = 0.0;
        } else {
            lam[i] -= t;
        }
        lam[j] += t;
        for (zk, dk) in self.z.iter_mut().zip(&dir) {
            *zk += t * dk;
        }
        // ∇ changes by t·Xᵀdir on the first block and −t·X⁻ᵀdir on the second
        for (gk, c) in self.gp.iter_mut().zip(&self.cols_p) {
            *gk += t * dot(c, &dir);
        }
        for (gk, c) in self.gm.iter_mut().zip(&self.cols_m) {
            *gk -= t * dot(c, &dir);
        }
        true
    }
}

/// `min ⟨g, s⟩` over the capped simplex.
fn lmo_value(g: &[f64], cap: f64) -> f64 {
    crate::solver::capped_min(g, cap)
}

fn finish(
    eta: Vec<f64>,
    xi: Vec<f64>,
    z: &[f64],
    gap: f64,
    iterations: usize,
    status: OracleStatus,
) -> OracleResult {
    let sq = dot(z, z);
    OracleResult {
        eta,
        xi,
        distance: sq.sqrt(),
        half_sq: 0.5 * sq,
        gap_certificate: gap,
        iterations,
        status,
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, k| if v[k] < v[best] { k } else { best })
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, k| if v[k] > v[best] { k } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(a: &[Vec<f64>], b: &[Vec<f64>]) -> TransformedData {
        let d = a[0].len();
        TransformedData::untransformed(Matrix::from_columns(d, a), Matrix::from_columns(d, b))
    }

    #[test]
    fn singletons() {
        let data = td(&[vec![1.0, 0.0]], &[vec![-1.0, 0.0]]);
        let g = gilbert_solve(&data, 1e-6).unwrap();
        assert_eq!((g.distance, g.iterations), (2.0, 0));
        let f = fw_oracle(&data, None, 1e-10).unwrap();
        assert_eq!(f.distance, 2.0);
        assert_eq!(f.iterations, 0);
    }

    #[test]
    fn parallel_segments() {
        let data = td(
            &[vec![0.0, 1.0], vec![0.0, -1.0]],
            &[vec![2.0, 1.0], vec![2.0, -1.0]],
        );
        let f = fw_oracle(&data, Some(1.0), 1e-10).unwrap();
        assert!((f.distance - 2.0).abs() < 1e-9);
        assert_eq!(f.status, OracleStatus::Converged);
    }

    #[test]
    fn capped_moves_to_the_reduced_hull() {
        // with ν = 1/2 both classes are pinned to their midpoints
        let data = td(
            &[vec![1.0, 1.0], vec![3.0, -1.0]],
            &[vec![-1.0, 0.0], vec![-3.0, 0.0]],
        );
        let f = fw_oracle(&data, Some(0.5), 1e-12).unwrap();
        assert!((f.distance - 4.0).abs() < 1e-9, "{}", f.distance);
    }

    #[test]
    fn overlapping_hulls() {
        let data = td(
            &[vec![1.0, 0.0], vec![-1.0, 0.0]],
            &[vec![0.0, 1.0], vec![0.0, -1.0]],
        );
        let f = fw_oracle(&data, None, 1e-12).unwrap();
        assert_eq!(f.status, OracleStatus::NonSeparable);
        let g = gilbert_solve(&data, 1e-3).unwrap();
        assert_eq!(g.status, OracleStatus::NonSeparable);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let data = td(&[vec![1.0], vec![2.0]], &[vec![-1.0]]);
        assert!(fw_oracle_from(&data, None, 1e-9, vec![0.7, 0.7], vec![1.0]).is_err());
        assert!(fw_oracle(&data, Some(0.4), 1e-9).is_err());
    }
}
