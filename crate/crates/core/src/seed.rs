//! Reproducible seeding.
//!
//! Every random object in the crate is a pure function of a `u64` seed fed to
//! a ChaCha8 stream. Independent sub-streams are derived by a counter-based
//! rule: `sub_seed(seed, i) = splitmix64(seed ^ splitmix64(i + 1))`. The rule
//! depends only on `(seed, i)`, never on scheduling, so trial `i` sees the same
//! randomness whatever the degree of parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}
