//! Deterministic random-stream derivation: a master seed plus a tag path
//! (experiment, cell, trial, …) yields an independent ChaCha stream, so
//! parallel cells can draw without sharing state and reruns are bit-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn derive_rng(master: u64, tags: &[u64]) -> ChaCha12Rng {
    let mut state = derive_key(master, tags);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        state = mix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// Fold a tag path into a sub-master seed; `derive_rng(derive_key(m, a), b)`
/// and nothing else in the tree collides with it.
pub fn derive_key(master: u64, tags: &[u64]) -> u64 {
    let mut state = mix(master ^ 0x9e37_79b9_7f4a_7c15);
    for &t in tags {
        state = mix(state ^ t);
    }
    state
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
