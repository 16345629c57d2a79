//! Reproducible, splittable random streams.
//!
//! Generator contract (stream format version 1):
//!
//! - Core generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`,
//!   64-bit block counter, 64-bit stream id).
//! - Key: four consecutive SplitMix64 outputs seeded with `master_seed`,
//!   each written little-endian into the 32-byte key.
//! - Stream id: `stream_index`; word position starts at zero.
//! - `uniform()` takes the top 53 bits of one `next_u64()` and scales by
//!   2^-53, giving a value in `[0, 1)`.
//! - `below(k)` uses Lemire's multiply-and-reject method on `next_u64()`.
//!
//! Everything above `next_u64()` is implemented in this crate, so sampled
//! sequences do not depend on the distribution code of any external crate.
//! Changing any item of this list is a breaking change of the stream format
//! and must bump [`STREAM_FORMAT_VERSION`]; the golden-value tests pin it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const STREAM_FORMAT_VERSION: u32 = 1;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One step of SplitMix64; returns the output and advances `state`.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child master seed, e.g. one per point of a parameter sweep.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut state = master_seed ^ index.wrapping_mul(GOLDEN_GAMMA);
    splitmix64(&mut state)
}

/// A deterministic random stream identified by `(master_seed, stream_index)`.
///
/// Streams are single-owner; concurrent work derives distinct stream indices
/// instead of sharing one stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut state = master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`, safe to pass to `ln`.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform integer in `0..k`. Panics if `k == 0`.
    #[inline]
    pub fn below(&mut self, k: u64) -> u64 {
        assert!(k > 0, "below(0) has no values");
        let mut m = (self.next_u64() as u128) * (k as u128);
        let mut low = m as u64;
        if low < k {
            let threshold = k.wrapping_neg() % k;
            while low < threshold {
                m = (self.next_u64() as u128) * (k as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Fisher-Yates shuffle driven by [`below`](Self::below).
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Convenience for `RngStream::new`.
pub fn rng_derive(master_seed: u64, stream_index: u64) -> RngStream {
    RngStream::new(master_seed, stream_index)
}
