//! Deterministic random-stream derivation.
//!
//! All randomness in the workspace flows from explicit `u64` seeds. A stream
//! is addressed by a seed plus a path of purpose/index labels, so distinct
//! purposes (state init, transitions, observations, exploration, ...) never
//! share draws and any stream can be re-derived from scratch — which is what
//! makes checkpoint resume and common-random-number evaluation exact.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, stable across platforms.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed named by `path` under `seed`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut state = mix(seed ^ 0x6b67_6f6e_7372_6e67); // tag so raw seeds differ from derived ones
    for (i, p) in path.iter().enumerate() {
        state = mix(state ^ p.wrapping_add((i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

/// Derive the stream named by `path` under `seed`.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

/// Sample an index from a finite distribution given by `probs`.
///
/// Uses one uniform draw and a cumulative scan; any residual mass from
/// rounding goes to the last index.
pub fn sample_categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.gen::<f64>();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
