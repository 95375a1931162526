//! SplitMix64, the single random stream behind every stochastic choice.
//!
//! A run owns exactly one [`Rng`] and threads it through world
//! initialization, the tick loop and the mutation operators. Because the
//! whole generator state is one `u64`, a stream can be checkpointed by
//! reading [`Rng::state`] and resumed later with [`Rng::new`].

use thiserror::Error;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RngError {
    #[error("bounded draw requested with an empty range (n = 0)")]
    EmptyRange,
}

/// Deterministic, portable pseudo-random generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng {
    state: u64,
}

impl Rng {
    /// Every `u64`, including zero, is a valid seed.
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Current internal state. `Rng::new(rng.state())` continues the stream.
    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX2);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, n)` by modulo reduction; one state advance.
    pub fn checked_below(&mut self, n: u64) -> Result<u64, RngError> {
        if n == 0 {
            return Err(RngError::EmptyRange);
        }
        Ok(self.next_u64() % n)
    }

    /// Uniform index in `[0, n)`.
    ///
    /// Panics when `n == 0`; callers guarantee a non-empty range.
    pub fn below(&mut self, n: usize) -> usize {
        match self.checked_below(n as u64) {
            Ok(v) => v as usize,
            Err(e) => panic!("{e}"),
        }
    }

    /// Uniform integer in the closed range `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo) as usize + 1) as u32
    }

    /// Uniform float in `[0, 1)` built from the top 53 bits of one draw.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial: one draw, true when it falls below `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}
