//! Deterministic stream splitting.
//!
//! Every random draw in the crate comes from a ChaCha8 generator whose seed is
//! derived from a root seed and an index path with splitmix64 mixing, so the
//! output of a task depends only on `(root, path)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a root seed and an index path.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    let mut s = splitmix64(root);
    for &p in path {
        s = splitmix64(s ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    s
}

/// Generator for the task identified by `path` under `root`.
pub fn stream(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, path))
}
