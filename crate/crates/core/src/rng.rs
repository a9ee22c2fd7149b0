//! Seeded randomness.
//!
//! Every random draw in the crate comes from a ChaCha8 stream
//! (`rand_chacha::ChaCha8Rng`) initialized with `SeedableRng::seed_from_u64`.
//! Bounded integers use Lemire's widening-multiply rejection method on
//! `next_u64`, implemented here rather than through `rand`'s range sampling
//! so the index sequence is pinned to this documented algorithm and can be
//! replayed from the seed alone in any language.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `[0, bound)`.
pub fn uniform_below(rng: &mut impl RngCore, bound: usize) -> usize {
    assert!(bound > 0, "bound must be positive");
    let bound = bound as u64;
    let mut m = (rng.next_u64() as u128) * (bound as u128);
    if (m as u64) < bound {
        let threshold = bound.wrapping_neg() % bound;
        while (m as u64) < threshold {
            m = (rng.next_u64() as u128) * (bound as u128);
        }
    }
    (m >> 64) as usize
}

/// Uniform f64 in `[0, 1)` from the top 53 bits of `next_u64`.
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// First `m` entries of a uniformly random permutation of `0..n`.
///
/// Forward Fisher–Yates: step `i` swaps slot `i` with a uniform slot in
/// `i..n`. Slots below `m` are final after `m` steps, so stopping early
/// yields exactly the prefix of the full permutation.
pub fn permutation_prefix(rng: &mut impl RngCore, n: usize, m: usize) -> Vec<usize> {
    assert!(m <= n);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..m.min(n.saturating_sub(1)) {
        let j = i + uniform_below(rng, n - i);
        perm.swap(i, j);
    }
    perm.truncate(m);
    perm
}
