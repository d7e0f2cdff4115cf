//! Seed derivation for independent random streams.
//!
//! Every parallelisable unit of work (a synthetic session, a tree, a CV
//! fold) draws from its own generator keyed by `(seed, index)`, so results
//! do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed for stream `index` under `domain` (a small tag that
/// keeps e.g. tree streams and fold streams from colliding).
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ domain.rotate_left(32)) ^ index)
}

pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, domain, index))
}

pub(crate) mod domain {
    pub const SESSION: u64 = 1;
    pub const CALIBRATION: u64 = 2;
    pub const SURVEY_ASSIGNMENT: u64 = 3;
    pub const TREE: u64 = 10;
    pub const FOLD: u64 = 11;
    pub const CV_SHUFFLE: u64 = 12;
}
