//! Counter-based uniforms keyed by absolute edge coordinates.
//!
//! There is no generator state: the uniform attached to an edge is a hash of
//! `(seed, base point, axis)`. Sampling order, region shape and scale never
//! influence the value an edge receives.

use crate::lattice::Edge;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Absorb a sequence of words into one 64-bit key.
#[inline]
pub fn hash_words(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    for w in words {
        h = mix64(h.wrapping_add(GOLDEN) ^ mix64(w));
    }
    h
}

/// Number of random bits in an edge uniform.
pub const UNIT_BITS: u32 = 62;

/// A uniform on `(0, 1)` stored exactly as `(2k + 1) / 2^63`, `k < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unit(u64);

impl Unit {
    pub fn from_bits(bits: u64) -> Self {
        Unit(bits >> (64 - UNIT_BITS))
    }

    /// Numerator over `2^63`; always odd, so never 0 and never 2^63.
    pub fn numerator(self) -> u64 {
        2 * self.0 + 1
    }

    pub const DENOMINATOR: u64 = 1 << 63;

    pub fn to_f64(self) -> f64 {
        self.numerator() as f64 / Self::DENOMINATOR as f64
    }
}

/// The uniform of edge `e` under `seed`.
pub fn edge_uniform(seed: u64, e: &Edge) -> Unit {
    let base = e.base();
    let words = base
        .coords()
        .iter()
        .map(|&c| c as u64)
        .chain(core::iter::once(e.axis() as u64 | ((base.dim() as u64) << 8)));
    Unit::from_bits(hash_words(seed, words))
}

/// Stream of uniforms for auxiliary sampling (independent copies, replicate
/// seeds) derived from a key.
pub fn keyed_unit(seed: u64, key: &[u64]) -> Unit {
    Unit::from_bits(hash_words(seed, key.iter().copied()))
}

/// Derive a child seed; used to give each replicate its own field.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    hash_words(seed, [tag, 0x5EED])
}
