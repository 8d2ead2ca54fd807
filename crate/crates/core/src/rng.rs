//! Platform-independent random draws.
//!
//! All search randomness comes from ChaCha8 seeded with `seed_from_u64`.
//! The helpers below only ever consume whole `u64` words so the sequence of
//! draws is identical on 32- and 64-bit targets.

use rand_core::{RngCore, SeedableRng};

pub use rand_chacha::ChaCha8Rng as SearchRng;

/// Stream used for bound calibration, kept apart from the search stream so
/// that supplying explicit bounds does not shift the search's draws.
pub const CALIBRATION_STREAM: u64 = 1;

pub fn search_rng(seed: u64) -> SearchRng {
    SearchRng::seed_from_u64(seed)
}

pub fn calibration_rng(seed: u64) -> SearchRng {
    let mut rng = SearchRng::seed_from_u64(seed);
    rng.set_stream(CALIBRATION_STREAM);
    rng
}

/// Draw helpers on top of any [`RngCore`].
pub trait Draw: RngCore {
    /// Uniform integer in `0..n`. `n` must be non-zero.
    fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        // Lemire's nearly-divisionless method
        let mut m = (self.next_u64() as u128) * (n as u128);
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = (self.next_u64() as u128) * (n as u128);
            }
        }
        (m >> 64) as u64
    }

    /// Uniform integer in `lo..=hi`.
    fn between(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    /// Uniform index into a non-empty slice.
    fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`.
    fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

impl<R: RngCore + ?Sized> Draw for R {}
