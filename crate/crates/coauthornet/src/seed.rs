//! Deterministic seed derivation.
//!
//! Every random decision in the crate draws from a generator seeded through
//! this module, so a single master seed controls a whole run. Purpose labels
//! keep independent subsystems (walks, splits, initialization, sampling) on
//! decorrelated streams, and per-index derivation makes parallel workers
//! schedule-independent.

/// FNV-1a 64-bit hash. Also the documented hash of the n-gram vectorizer.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer; a cheap bijective mixer with good avalanche.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for a named purpose: `splitmix64(master ^ fnv1a64(label))`.
pub fn derive(master: u64, label: &str) -> u64 {
    splitmix64(master ^ fnv1a64(label.as_bytes()))
}

/// Seed for the `index`-th worker of a named purpose.
pub fn derive_indexed(master: u64, label: &str, index: u64) -> u64 {
    splitmix64(derive(master, label) ^ splitmix64(index))
}

/// Seed for a two-dimensional work item, e.g. (start node, walk number).
pub fn derive_indexed2(master: u64, label: &str, a: u64, b: u64) -> u64 {
    splitmix64(derive(master, label) ^ splitmix64(a) ^ splitmix64(b).rotate_left(32))
}
