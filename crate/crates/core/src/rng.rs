//! Counter-keyed standard normal draws.
//!
//! Draw `i` of replicate `r` under master seed `s` is a pure function of
//! `(s, r, i)`: the ChaCha8 keystream is keyed by `s`, the stream id is `r`,
//! and draw `i` consumes exactly the four 32-bit words at position `4i`.
//! Sequential reads and random access therefore produce the same values, and
//! replicates can be simulated in any order or on any thread.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifies one replicate's noise stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReplicateSeed {
    pub master: u64,
    pub stream: u64,
}

impl ReplicateSeed {
    pub fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    /// Stream id for replicate `replicate` of sub-experiment `block`.
    ///
    /// Keeps the streams of distinct arms of one experiment disjoint.
    pub fn blocked(master: u64, block: u32, replicate: u32) -> Self {
        Self::new(master, (u64::from(block) << 32) | u64::from(replicate))
    }
}

const WORDS_PER_DRAW: u128 = 4;

/// Standard normal draws for one replicate.
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: ReplicateSeed) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.master);
        rng.set_stream(seed.stream);
        rng.set_word_pos(0);
        Self { rng }
    }

    /// Positions the stream so that the next call to [`next_normal`](Self::next_normal)
    /// returns draw `index` (0-based).
    pub fn seek(&mut self, index: u64) {
        self.rng.set_word_pos(u128::from(index) * WORDS_PER_DRAW);
    }

    /// Box–Muller (cosine branch) from two 53-bit uniforms.
    pub fn next_normal(&mut self) -> f64 {
        // u1 ∈ (0, 1] keeps the logarithm finite.
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn draw_at(seed: ReplicateSeed, index: u64) -> f64 {
        let mut s = Self::new(seed);
        s.seek(index);
        s.next_normal()
    }
}
