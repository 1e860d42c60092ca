//! Data conditioning: scale to the unit ball, flip coordinate signs at
//! random, and rotate with the normalized Walsh–Hadamard transform.
//!
//! The combined map `x ↦ W·D·(s·x)` is an isometry up to the global factor
//! `s`, so polytope distances and margins are preserved (in scaled units)
//! while the mass of every point gets spread evenly across coordinates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{split_classes, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{self, Stream};

/// Factor `s` such that `max_i ‖s·x_i‖ = 1`.
pub fn compute_scale(data: &Dataset) -> Result<f64> {
    let max = data
        .points()
        .iter()
        .map(|p| safe_norm(&p.features))
        .fold(0.0f64, f64::max);
    if max == 0.0 {
        return Err(Error::Validation("all points are zero".into()));
    }
    if !max.is_finite() || !(1.0 / max).is_normal() {
        return Err(Error::Validation(format!("largest point norm {max:e} is out of range")));
    }
    Ok(1.0 / max)
}

/// Euclidean norm that does not overflow when squaring large entries.
fn safe_norm(x: &[f64]) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

/// Unnormalized in-place Sylvester–Hadamard butterfly.
fn fwht_in_place(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = a + b;
                *y = a - b;
            }
        }
        h *= 2;
    }
}

/// `(1/√n)·H·v` for a power-of-two length `n`.
pub fn fwht_normalized(v: &[f64]) -> Result<Vec<f64>> {
    if !v.len().is_power_of_two() {
        return Err(Error::Config(format!(
            "Hadamard transform needs a power-of-two length, got {}",
            v.len()
        )));
    }
    let mut out = v.to_vec();
    fwht_in_place(&mut out);
    let f = 1.0 / (v.len() as f64).sqrt();
    out.iter_mut().for_each(|x| *x *= f);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    /// Scale, sign flip and normalized Hadamard rotation.
    Hadamard,
    /// Data used as given (tests and hand-built geometry).
    Identity,
}

/// Everything needed to map a raw point into solver coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub seed: u64,
    /// Input dimension.
    pub d: usize,
    pub d_pad: usize,
    pub scale: f64,
    pub signs: Vec<f64>,
}

impl TransformSpec {
    pub fn hadamard(d: usize, scale: f64, seed: u64) -> Self {
        let d_pad = d.next_power_of_two();
        let mut rng = rng::stream(seed, Stream::Transform);
        let signs = (0..d_pad)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        TransformSpec {
            kind: TransformKind::Hadamard,
            seed,
            d,
            d_pad,
            scale,
            signs,
        }
    }

    pub fn identity(d: usize) -> Self {
        TransformSpec {
            kind: TransformKind::Identity,
            seed: 0,
            d,
            d_pad: d,
            scale: 1.0,
            signs: vec![1.0; d],
        }
    }

    /// Maps a raw point (length at most `d`) into solver coordinates.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert!(x.len() <= self.d_pad, "point longer than padded dimension");
        let mut v = vec![0.0; self.d_pad];
        for ((o, &xi), &s) in v.iter_mut().zip(x).zip(&self.signs) {
            *o = self.scale * s * xi;
        }
        if self.kind == TransformKind::Hadamard {
            fwht_in_place(&mut v);
            let f = 1.0 / (self.d_pad as f64).sqrt();
            v.iter_mut().for_each(|x| *x *= f);
        }
        v
    }
}

/// Both classes in solver coordinates: `xp` is `d_pad × n1`, `xm` is
/// `d_pad × n2`, columns in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedData {
    pub xp: Matrix,
    pub xm: Matrix,
    pub spec: TransformSpec,
}

impl TransformedData {
    /// Wraps class matrices that are already in solver coordinates.
    pub fn untransformed(xp: Matrix, xm: Matrix) -> Self {
        assert_eq!(xp.rows(), xm.rows(), "class matrices disagree on dimension");
        let spec = TransformSpec::identity(xp.rows());
        TransformedData { xp, xm, spec }
    }

    pub fn d_pad(&self) -> usize {
        self.xp.rows()
    }

    pub fn n1(&self) -> usize {
        self.xp.cols()
    }

    pub fn n2(&self) -> usize {
        self.xm.cols()
    }

    pub fn n(&self) -> usize {
        self.n1() + self.n2()
    }
}

pub fn apply_transform(data: &Dataset, seed: u64) -> Result<TransformedData> {
    let scale = compute_scale(data)?;
    let spec = TransformSpec::hadamard(data.dim(), scale, seed);
    let classes = split_classes(data);
    let map = |m: &Matrix| {
        let cols: Vec<Vec<f64>> = m.columns().map(|c| spec.apply(&c)).collect();
        Matrix::from_columns(spec.d_pad, &cols)
    };
    Ok(TransformedData {
        xp: map(&classes.a),
        xm: map(&classes.b),
        spec: spec.clone(),
    })
}
