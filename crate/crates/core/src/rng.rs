//! Deterministic per-replicate random streams.
//!
//! Replicate `k` of run `s` under seed `seed` always draws from the same
//! ChaCha8 stream, so results do not depend on how replicates are scheduled
//! across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Identifies a family of streams: one per (seed, run) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: u64,
}

impl StreamKey {
    pub fn new(seed: u64, run: u64) -> Self {
        StreamKey { key: mix64(seed ^ mix64(run)) }
    }

    /// Generator for replicate `k`.
    pub fn replicate(&self, k: u64) -> ReplicateRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.key);
        inner.set_stream(k);
        ReplicateRng { inner, bits: 0, left: 0 }
    }
}

/// Thin wrapper with the few draws the samplers need.
pub struct ReplicateRng {
    inner: ChaCha8Rng,
    bits: u64,
    left: u32,
}

impl ReplicateRng {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A fair random sign, drawn from a buffered 64-bit word.
    pub fn sign(&mut self) -> f64 {
        if self.left == 0 {
            self.bits = self.inner.next_u64();
            self.left = 64;
        }
        let b = self.bits & 1;
        self.bits >>= 1;
        self.left -= 1;
        if b == 1 {
            1.0
        } else {
            -1.0
        }
    }
}
