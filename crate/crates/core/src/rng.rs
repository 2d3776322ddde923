//! The single random source used by experiments and samplers.
//!
//! All randomness is drawn from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `SeedableRng::seed_from_u64(seed)`. `seed_from_u64` expands the
//! 64-bit seed with PCG32 into the 32-byte ChaCha key, as documented by
//! `rand_core`, so any implementation of those two published algorithms
//! reproduces our streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for cell `index` of a seeded experiment.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
