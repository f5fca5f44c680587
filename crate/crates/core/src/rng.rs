//! Seeded random streams.
//!
//! Every random draw in the simulator goes through [`SimRng`], a ChaCha8
//! stream (`rand_chacha::ChaCha8Rng::seed_from_u64`). Independent streams
//! for one scenario are keyed by [`derive_seed`], which mixes the scenario
//! seed with a stream tag and an index through SplitMix64. Floats are built
//! from the top 53 bits of `next_u64`, so the mapping from seed to values
//! does not depend on any distribution code that could change upstream.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Name written to run metadata.
pub const PRNG_NAME: &str =
    "ChaCha8 (rand_chacha 0.3, seed_from_u64); sub-seeds via SplitMix64(seed ^ tag, index); f64 = (u64 >> 11) * 2^-53";

/// Stream tags for [`derive_seed`].
pub mod stream {
    pub const DEPLOYMENT: u64 = 0x6465_706c;
    pub const LOCALIZATION: u64 = 0x6c6f_6361;
    pub const ANCHORS: u64 = 0x616e_6368;
    pub const PAIRS: u64 = 0x7061_6972;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for stream `tag`, draw `index` of scenario `seed`.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ tag.rotate_left(32)).wrapping_add(index))
}

pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound` (rejection sampling, no modulo bias).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.0.next_u64();
            if v <= zone {
                return (v % bound) as usize;
            }
        }
    }
}
