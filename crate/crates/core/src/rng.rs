//! Seeded random streams.
//!
//! Every random decision in the pipeline is drawn from a [`SeededRng`] whose
//! seed is derived from a master seed and the coordinates of the work item,
//! so results never depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Portable, reproducible generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with two stream coordinates into a substream seed.
pub fn mix64(master_seed: u64, a: u64, b: u64) -> u64 {
    let mut h = avalanche(master_seed.wrapping_add(GOLDEN));
    h = avalanche(h ^ a.wrapping_add(GOLDEN).wrapping_mul(3));
    avalanche(h ^ b.wrapping_add(GOLDEN).wrapping_mul(5))
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for the `(index, sub_index)` work item under `master_seed`.
pub fn substream(master_seed: u64, index: u64, sub_index: u64) -> SeededRng {
    rng_from_seed(mix64(master_seed, index, sub_index))
}
