//! Seeded random streams.
//!
//! Every random decision derives from one user seed. Each consumer draws
//! from its own ChaCha stream so that, for example, changing the number of
//! clients in a simulation never perturbs the coordinate sampling sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Rademacher signs of the Hadamard preconditioner.
    Transform,
    /// Coordinate picked at every solver iteration.
    Sampling,
    /// Assignment of points to simulated clients.
    Partition,
    /// Synthetic data generation in tests and tools.
    Synthetic,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Transform => 1,
            Stream::Sampling => 2,
            Stream::Partition => 3,
            Stream::Synthetic => 4,
        }
    }
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}
