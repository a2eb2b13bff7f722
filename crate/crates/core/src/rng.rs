//! Seeded randomness. Every random choice in the crate draws from a
//! ChaCha8 stream (a counter-based generator) keyed by a `u64` seed, so
//! outputs are reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
