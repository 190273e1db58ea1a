//! Seed derivation for per-trial random streams.
//!
//! Every trial draws from its own `ChaCha8Rng`, seeded by mixing
//! `(seed, sweep_index, trial_index)` through SplitMix64. Trials therefore
//! do not depend on evaluation order and may run in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the substream for one trial of one sweep point.
pub fn substream_seed(seed: u64, sweep_index: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ sweep_index) ^ trial_index)
}

pub fn substream(seed: u64, sweep_index: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, sweep_index, trial_index))
}
