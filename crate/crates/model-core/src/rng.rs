//! Counter-based random numbers.
//!
//! Every draw is addressed by `(seed, stream, index)`: the key is the seed,
//! the ChaCha8 stream id selects an independent sequence and the index is the
//! position of a 64-bit word pair inside it. Sequential reads from a
//! [`Stream`] give the same values as random access with [`u64_at`].

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, stream: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(2 * index as u128);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform on `(0, 1]`, safe to pass to `ln`.
    pub fn next_open_f64(&mut self) -> f64 {
        1.0 - self.next_f64()
    }
}

pub fn u64_at(seed: u64, stream: u64, index: u64) -> u64 {
    Stream::new(seed, stream, index).next_u64()
}

pub fn f64_at(seed: u64, stream: u64, index: u64) -> f64 {
    to_unit(u64_at(seed, stream, index))
}

fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
