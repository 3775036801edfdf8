//! Deterministic seed derivation.
//!
//! Every random stream in the crate is derived from one user seed plus a
//! role tag and optional indices, so results do not depend on the order in
//! which independent work items are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAG_CHANNEL: u64 = 0x6368_616e;
pub const TAG_SYMBOLS: u64 = 0x7379_6d62;
pub const TAG_NOISE: u64 = 0x6e6f_6973;
pub const TAG_DEMAND: u64 = 0x6465_6d64;
pub const TAG_PAYLOAD: u64 = 0x7061_796c;

// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into `seed`; stable across platforms and compiler versions.
pub fn derive(seed: u64, words: &[u64]) -> u64 {
    words.iter().fold(mix64(seed), |acc, &w| mix64(acc ^ mix64(w)))
}

pub fn rng(seed: u64, words: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, words))
}
