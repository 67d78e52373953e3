//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] keyed by a
//! master seed and an index. Work item `i` always sees the same stream no
//! matter which thread runs it or in what order, so parallel loops are
//! reproducible.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream purposes. Distinct purposes never share a key.
pub const BOOTSTRAP: u64 = 0x6f6f_7473_7472_6170;
pub const SCENARIO: u64 = 0x7363_656e_6172_696f;
pub const REPLICATION_SEED: u64 = 0x7265_706c_6963_6174;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream `index` of the generator keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    rng.set_stream(index);
    rng
}

/// Stream `index` for a given purpose, e.g. bootstrap replication `b`.
pub fn purpose_stream(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    stream(splitmix64(seed ^ purpose), index)
}

/// A child master seed, used when a replication needs its own nested streams.
pub fn derive_seed(seed: u64, purpose: u64, index: u64) -> u64 {
    purpose_stream(seed, purpose, index).next_u64()
}
