//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wardlab::Sequence;

/// A seeded random walk with steps in `[-1, 1]`.
pub fn random_walk(seed: u64, len: usize) -> Sequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let values = (0..len)
        .map(|_| {
            x += rng.random_range(-1.0..=1.0);
            x
        })
        .collect();
    Sequence::from_values(format!("walk({seed})"), values)
}
