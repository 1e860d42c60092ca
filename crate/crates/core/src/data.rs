//! Labeled point clouds, LIBSVM input, and the two class matrices.
//!
//! Input lines look like
//!
//! ```text
//! +1 1:0.5 3:-2.0
//! -1 2:1.25
//! ```
//!
//! Indices are 1-based and strictly increasing within a line. Absent
//! indices are zero; the dimension is the largest index seen unless a larger
//! one is forced by the caller.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }
}

/// How raw label tokens map onto the two classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelPolicy {
    /// Only `1`, `+1` and `-1`.
    #[default]
    Strict,
    /// Additionally maps `0` and `2` to the negative class.
    ZeroTwoNegative,
}

impl LabelPolicy {
    fn map(self, token: &str) -> Option<Label> {
        let v: f64 = token.parse().ok()?;
        if v == 1.0 {
            Some(Label::Positive)
        } else if v == -1.0 || (self == LabelPolicy::ZeroTwoNegative && (v == 0.0 || v == 2.0)) {
            Some(Label::Negative)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub features: Vec<f64>,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        LabeledPoint { features, label }
    }
}

/// A validated two-class dataset. All points share dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
    d: usize,
    n1: usize,
    n2: usize,
}

impl Dataset {
    /// Validates and zero-pads `points` to a common dimension, which is the
    /// longest feature vector or `min_dim`, whichever is larger.
    pub fn new(mut points: Vec<LabeledPoint>, min_dim: Option<usize>) -> Result<Self> {
        let d = points
            .iter()
            .map(|p| p.features.len())
            .max()
            .unwrap_or(0)
            .max(min_dim.unwrap_or(0));
        if d == 0 {
            return Err(Error::Validation("dataset has no features".into()));
        }
        for (i, p) in points.iter_mut().enumerate() {
            if let Some(v) = p.features.iter().find(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "point {i} has a non-finite feature ({v})"
                )));
            }
            p.features.resize(d, 0.0);
        }
        let n1 = points.iter().filter(|p| p.label == Label::Positive).count();
        let n2 = points.len() - n1;
        if n1 == 0 || n2 == 0 {
            return Err(Error::Validation(format!(
                "both classes must be present (found {n1} positive, {n2} negative)"
            )));
        }
        Ok(Dataset { points, d, n1, n2 })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Zero-pads every point to dimension `d`. Shrinking is not allowed.
    pub fn with_dim(mut self, d: usize) -> Result<Self> {
        if d < self.d {
            return Err(Error::Validation(format!(
                "cannot shrink dimension {} to {d}",
                self.d
            )));
        }
        for p in &mut self.points {
            p.features.resize(d, 0.0);
        }
        self.d = d;
        Ok(self)
    }

    /// Serializes back to LIBSVM text. Zero features are omitted.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(match p.label {
                Label::Positive => "+1",
                Label::Negative => "-1",
            });
            for (i, &v) in p.features.iter().enumerate() {
                if v != 0.0 {
                    let _ = write!(out, " {}:{}", i + 1, v);
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn parse_libsvm(text: &str, policy: LabelPolicy, min_dim: Option<usize>) -> Result<Dataset> {
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        points.push(parse_line(line, policy).map_err(|message| Error::Parse {
            line: lineno + 1,
            message,
        })?);
    }
    Dataset::new(points, min_dim)
}

pub fn read_libsvm(path: impl AsRef<Path>, policy: LabelPolicy, min_dim: Option<usize>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_libsvm(&text, policy, min_dim)
}

fn parse_line(line: &str, policy: LabelPolicy) -> std::result::Result<LabeledPoint, String> {
    let mut tokens = line.split_ascii_whitespace();
    let label_tok = tokens.next().ok_or("missing label")?;
    let label = policy
        .map(label_tok)
        .ok_or_else(|| format!("unsupported label '{label_tok}'"))?;

    let mut features: Vec<f64> = Vec::new();
    let mut last = 0usize;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| format!("expected <index>:<value>, got '{tok}'"))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| format!("bad feature index '{idx}'"))?;
        if idx == 0 {
            return Err("feature indices are 1-based".into());
        }
        if idx <= last {
            return Err(format!("feature index {idx} does not increase (previous {last})"));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| format!("bad feature value '{val}'"))?;
        if !val.is_finite() {
            return Err(format!("non-finite feature value '{val}'"));
        }
        features.resize(idx, 0.0);
        features[idx - 1] = val;
        last = idx;
    }
    Ok(LabeledPoint { features, label })
}

/// The positive points as columns of `a` and the negative points as columns
/// of `b`, both in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMatrices {
    pub a: Matrix,
    pub b: Matrix,
}

pub fn split_classes(data: &Dataset) -> ClassMatrices {
    let collect = |label: Label| -> Vec<Vec<f64>> {
        data.points
            .iter()
            .filter(|p| p.label == label)
            .map(|p| p.features.clone())
            .collect()
    };
    ClassMatrices {
        a: Matrix::from_columns(data.d, &collect(Label::Positive)),
        b: Matrix::from_columns(data.d, &collect(Label::Negative)),
    }
}
