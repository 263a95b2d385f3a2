//! Deterministic seed derivation.
//!
//! Every random decision in the crate flows from a master seed through
//! explicit derivation paths (run index, epoch, batch, sample, ...), so
//! results are independent of evaluation order and parallel schedule.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a good 64-bit mixing function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a branch `tag`.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix(seed ^ mix(tag ^ 0xA24B_AED4_963E_E407))
}

/// Derives a seed along a multi-level path, e.g. `(master, [run, epoch, batch])`.
pub fn derive_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &tag| derive(s, tag))
}

/// A seeded ChaCha stream for the given derivation point.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
