//! Counter-based seed derivation.
//!
//! Every random stream of an experiment is keyed by `(parent, stream, index)`
//! and mixed with splitmix64, so a trial's inputs never depend on which worker
//! ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived seed is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Trial = 1,
    Pattern = 2,
    Target = 3,
    Weights = 4,
    Order = 5,
    Split = 6,
    Channel = 7,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child(parent: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(parent ^ splitmix64(stream as u64)).wrapping_add(index))
}

pub fn rng(parent: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child(parent, stream, index))
}
