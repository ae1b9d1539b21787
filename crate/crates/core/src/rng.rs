//! Seeding conventions.
//!
//! Every random stream in the crate is a ChaCha8 generator (a counter-based
//! stream cipher, so output is identical on every platform) seeded from a
//! single `u64`. Streams that must not depend on scheduling, such as one per
//! cross-validation fold or per forest tree, get their own seed through
//! [`derive_seed`], a SplitMix64 hash of the parent seed and a path of
//! integer labels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a parent seed together with a path of labels into a child seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}
