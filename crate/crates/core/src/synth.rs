//! Small random two-class instances for tests and demos.

use rand::Rng;

use crate::data::{Dataset, Label, LabeledPoint};
use crate::rng::{self, Stream};

/// Shape of a random instance.
#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    /// Point count range before intruders; at least 4.
    pub min_n: usize,
    pub max_n: usize,
    pub max_d: usize,
    /// Signed gap between the classes along a hidden direction: positive
    /// values give separable data, negative values make the classes overlap.
    pub gap: f64,
    /// Extra points per class placed at the midpoint of two points of the
    /// other class. Any intruder makes the full hulls intersect.
    pub intruders: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            min_n: 4,
            max_n: 20,
            max_d: 8,
            gap: 0.2,
            intruders: 0,
        }
    }
}

/// Points uniform in `[-1, 1]^d`, labeled by a random hyperplane through a
/// random offset, then pushed `gap/2` away from it (or towards each other
/// for a negative gap). Both classes always get at least two points.
pub fn random_instance(seed: u64, shape: InstanceShape) -> Dataset {
    let mut rng = rng::stream(seed, Stream::Synthetic);
    let d = rng.gen_range(2..=shape.max_d.max(2));
    let lo = shape.min_n.max(4);
    let n = rng.gen_range(lo..=shape.max_n.max(lo));
    let mut u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.iter_mut().for_each(|v| *v /= len);
    let offset = rng.gen_range(-0.3..0.3);

    let mut points: Vec<LabeledPoint> = (0..n)
        .map(|k| {
            let mut x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let side: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() - offset;
            // the first four points fix two of each class
            let label = match k {
                0 | 2 => Label::Positive,
                1 | 3 => Label::Negative,
                _ if side >= 0.0 => Label::Positive,
                _ => Label::Negative,
            };
            let s = label.sign();
            // move along u so that s·(⟨u, x⟩ − offset) = |side| + gap/2
            let shift = s * (side.abs() + shape.gap / 2.0) - side;
            x.iter_mut().zip(&u).for_each(|(xi, ui)| *xi += shift * ui);
            LabeledPoint::new(x, label)
        })
        .collect();
    for label in [Label::Positive, Label::Negative] {
        let host: Vec<Vec<f64>> = points
            .iter()
            .filter(|p| p.label != label)
            .map(|p| p.features.clone())
            .collect();
        for _ in 0..shape.intruders {
            let a = &host[rng.gen_range(0..host.len())];
            let b = &host[rng.gen_range(0..host.len())];
            let mid = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
            points.push(LabeledPoint::new(mid, label));
        }
    }
    // keep input order random with respect to labels
    for k in (1..points.len()).rev() {
        let j = rng.gen_range(0..=k);
        points.swap(k, j);
    }
    Dataset::new(points, None).expect("both classes are present")
}
