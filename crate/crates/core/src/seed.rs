//! Deterministic seed derivation.
//!
//! Every random stream in the workspace (instance generation, decomposition
//! sampling, optimizer initialization, measurement shots, per-task worker
//! seeds) is keyed by a `u64` derived from a master seed plus a few context
//! words. The derivation is a fixed splitmix64 chain, so the same inputs give
//! the same stream on every platform and with any number of worker threads.

/// splitmix64 finalizer; good avalanche behavior for cheap key mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into a single seed. Order matters: `derive_seed(&[a, b])`
/// and `derive_seed(&[b, a])` are unrelated streams.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x517c_c1b7_2722_0a95_u64;
    for &p in parts {
        acc = mix(acc ^ p);
    }
    acc
}
