//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 generator keyed by a 64-bit
//! seed. Independent trials use the same key with distinct 64-bit stream ids,
//! so trial `i` of seed `s` always sees the same bits regardless of which
//! thread runs it or in what order trials complete.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for a seed's default stream (stream 0).
pub fn seeded(seed: u64) -> Rng {
    stream(seed, 0)
}
