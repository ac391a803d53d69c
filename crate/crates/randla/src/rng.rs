//! Seed plumbing for the randomized paths.
//!
//! Every operation builds its own ChaCha8 generator from a 64-bit seed; state
//! is never shared between calls. Nested algorithms derive per-call seeds
//! with [`derive_seed`], a SplitMix64 mix of the base seed and a stream
//! index, so a single user-facing seed reproduces an entire decomposition.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministically derives an independent stream seed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
