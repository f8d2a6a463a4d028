//! Deterministic named RNG streams.
//!
//! Every random choice in the workspace flows from one top-level `u64` seed.
//! Independent components draw from named sub-streams so that adding a new
//! consumer never shifts the randomness seen by existing ones, and per-item
//! streams keep generation order-independent (item 707 of a dataset is the
//! same graph whether or not items 0..706 were generated first).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a; stable and documented so stream names hash identically
/// everywhere.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for the named sub-stream of `seed`.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ fnv1a(name.as_bytes())))
}

/// RNG for item `index` within the named sub-stream.
pub fn item_stream(seed: u64, name: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(
        splitmix(seed ^ fnv1a(name.as_bytes())).wrapping_add(index),
    ))
}
