//! Assignment of training points to clients.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PartitionScheme {
    /// Point `j` goes to client `j mod k`.
    #[default]
    RoundRobin,
    /// Consecutive runs of near-equal length.
    Contiguous,
    /// Round robin over a seeded permutation.
    Shuffled,
}

/// Points held by one client, as ascending indices into each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

/// Splits `n1 + n2` points over `k` clients. Points are numbered positives
/// first; every client receives at least one point.
pub fn partition(n1: usize, n2: usize, k: usize, scheme: PartitionScheme, seed: u64) -> Result<Vec<Share>> {
    let n = n1 + n2;
    if k == 0 || k > n {
        return Err(Error::Config(format!("client count must lie in [1, {n}], got {k}")));
    }
    let mut owner = vec![0usize; n];
    match scheme {
        PartitionScheme::RoundRobin => {
            for (j, o) in owner.iter_mut().enumerate() {
                *o = j % k;
            }
        }
        PartitionScheme::Contiguous => {
            let (base, extra) = (n / k, n % k);
            let mut j = 0;
            for c in 0..k {
                let len = base + usize::from(c < extra);
                owner[j..j + len].fill(c);
                j += len;
            }
        }
        PartitionScheme::Shuffled => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng::stream(seed, Stream::Partition));
            for (slot, &j) in perm.iter().enumerate() {
                owner[j] = slot % k;
            }
        }
    }
    let mut shares = vec![
        Share {
            pos: Vec::new(),
            neg: Vec::new()
        };
        k
    ];
    for (j, &c) in owner.iter().enumerate() {
        if j < n1 {
            shares[c].pos.push(j);
        } else {
            shares[c].neg.push(j - n1);
        }
    }
    Ok(shares)
}
