//! Seed derivation for reproducible substreams.
//!
//! Every consumer of randomness (a y-strip of the obstacle field, a
//! (density, seed) cell of a sweep, a property-test corpus) gets its own
//! ChaCha8 stream whose seed is a pure function of a master seed and the
//! consumer's integer coordinates. Streams therefore never depend on
//! execution order, worker count, or how a band was extended.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; bijective on u64 with good avalanche behavior.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with stream coordinates into a derived seed.
pub fn mix(seed: u64, words: &[u64]) -> u64 {
    let mut acc = splitmix64(seed);
    for &w in words {
        acc = splitmix64(acc ^ splitmix64(w));
    }
    acc
}

/// Stream for y-strip `strip` of the field with the given seed.
pub fn strip_rng(seed: u64, strip: i64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, &[0x0053_5452_4950u64, strip as u64]))
}

/// Stream seed for cell (density index, seed index) of a sweep.
pub fn cell_seed(master: u64, rho_idx: u64, seed_idx: u64) -> u64 {
    mix(master, &[0x4345_4c4cu64, rho_idx, seed_idx])
}

/// General-purpose derived stream for tests and auxiliary draws.
pub fn derived_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, &[tag]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn mix_is_order_sensitive_and_stable() {
        assert_eq!(mix(7, &[1, 2]), mix(7, &[1, 2]));
        assert_ne!(mix(7, &[1, 2]), mix(7, &[2, 1]));
        assert_ne!(mix(7, &[1]), mix(8, &[1]));
    }

    #[test]
    fn strip_streams_are_independent_of_request_order() {
        let mut a1 = strip_rng(42, 3);
        let mut b1 = strip_rng(42, 4);
        // Re-derive in the opposite order; the streams must be identical.
        let mut b2 = strip_rng(42, 4);
        let mut a2 = strip_rng(42, 3);
        for _ in 0..16 {
            assert_eq!(a1.next_u64(), a2.next_u64());
            assert_eq!(b1.next_u64(), b2.next_u64());
        }
    }

    #[test]
    fn neighboring_strips_do_not_collide() {
        let mut seen = std::collections::HashSet::new();
        for strip in -64..64 {
            assert!(seen.insert(mix(1234, &[0x0053_5452_4950u64, strip as u64])));
        }
    }
}
