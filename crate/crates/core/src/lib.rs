//! Linear SVM training through primal-dual saddle point iterations.
//!
//! The crate covers the full pipeline for two-class linear SVMs:
//!
//! * [`data`]: LIBSVM parsing and the split into the two class matrices,
//! * [`preprocess`]: norm scaling followed by a randomized, normalized
//!   Walsh–Hadamard rotation,
//! * [`solver`]: the accelerated stochastic saddle point solver for the
//!   hard-margin and ν-SVM problems (convex hull / reduced convex hull
//!   distance),
//! * [`oracle`]: Gilbert's algorithm and a certified Frank–Wolfe solver used
//!   as ground truth,
//! * [`distributed`]: a deterministic server/clients simulation of the same
//!   solver with exact communication metering.

pub mod data;
pub mod distributed;
mod error;
pub mod matrix;
pub mod oracle;
pub mod preprocess;
pub mod rng;
pub mod solver;
pub mod synth;

pub use data::{parse_libsvm, split_classes, ClassMatrices, Dataset, LabelPolicy, LabeledPoint};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use preprocess::{apply_transform, TransformSpec, TransformedData};
pub use solver::{solve, Mode, Outcome, Solution, SolverConfig, SolverParams, StopRule};
