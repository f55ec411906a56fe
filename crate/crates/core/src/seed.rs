//! Seed splitting for independent random streams.
//!
//! Trajectory `k` of an ensemble with master seed `s` draws from a
//! `ChaCha8Rng` seeded with `child_seed(s, k)`, where
//!
//! ```text
//! child_seed(s, k) = splitmix64(s ^ splitmix64(k + 0x9E3779B97F4A7C15))
//! ```
//!
//! and `splitmix64` is the finalizer of Steele, Lea and Flood's SplitMix64.
//! Child streams depend only on `(s, k)`, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The pseudorandom stream type used by every sampler in this crate.
pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Stream for a bare seed.
pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for trajectory `index` under `master`.
pub fn child_stream(master: u64, index: u64) -> StreamRng {
    stream(child_seed(master, index))
}
