//! The single pseudo-random generator used across the crate.
//!
//! Every seeded routine draws from ChaCha8 seeded with `seed_from_u64`.
//! Work that is split into independent chunks (walk trials, experiment
//! repetitions) gives chunk `i` its own ChaCha stream `i`, so results do
//! not depend on how chunks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
