//! Deterministic counter-based random streams.
//!
//! Every stream is a pure function of `(seed, stream_id, index)`: the value at
//! any index can be computed without generating the preceding ones. Monte
//! Carlo code derives one child stream per sample index, which makes results
//! bit-identical for any worker count or chunking, and training code consumes
//! streams sequentially through the stateful counter.

use crate::{Error, Result};
use crate::math::normal_inverse_cdf;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD605_0EB5_D2CA_3F29;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed random stream with random access by index.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    key: u64,
    counter: u64,
}

impl RngStream {
    /// Creates the stream identified by `(seed, stream_id)`.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = mix64(mix64(seed.wrapping_add(GOLDEN)) ^ stream_id.wrapping_mul(STREAM_SALT));
        RngStream { seed, stream_id, key, counter: 0 }
    }

    /// Seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream id this stream was created with.
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Current sequential position.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Child stream derived from this stream's identity and `child_id`.
    ///
    /// Children of distinct ids, and children of distinct parents, are
    /// statistically independent streams.
    pub fn substream(&self, child_id: u64) -> RngStream {
        RngStream::new(self.key, child_id)
    }

    /// Raw 64-bit value at `index`, independent of the counter.
    #[inline]
    pub fn raw_at(&self, index: u64) -> u64 {
        mix64(self.key.wrapping_add(index.wrapping_mul(GOLDEN)))
    }

    /// Uniform value in the open interval (0, 1) at `index`.
    #[inline]
    pub fn u01_at(&self, index: u64) -> f64 {
        ((self.raw_at(index) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Next uniform value in (0, 1), advancing the counter.
    #[inline]
    pub fn next_u01(&mut self) -> f64 {
        let v = self.u01_at(self.counter);
        self.counter += 1;
        v
    }

    /// Next raw 64-bit value, advancing the counter.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.raw_at(self.counter);
        self.counter += 1;
        v
    }

    /// Next standard normal draw (inverse CDF applied to `next_u01`).
    #[inline]
    pub fn next_standard_normal(&mut self) -> f64 {
        normal_inverse_cdf(self.next_u01()).expect("u01 is strictly inside (0, 1)")
    }

    /// Next uniform draw on `[lo, hi)`.
    #[inline]
    pub fn next_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_u01()
    }

    /// Next integer uniform on `0..n`. Panics if `n == 0`.
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index: n must be positive");
        let i = (self.next_u01() * n as f64) as usize;
        i.min(n - 1)
    }
}

/// Draws `n` i.i.d. Gaussian samples with the given mean and variance.
///
/// Errors if `variance` is negative or not finite.
pub fn gaussian(rng: &mut RngStream, mean: f64, variance: f64, n: usize) -> Result<Vec<f64>> {
    if !(variance >= 0.0 && variance.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gaussian: variance must be finite and nonnegative, got {variance}"
        )));
    }
    let sd = variance.sqrt();
    Ok((0..n).map(|_| mean + sd * rng.next_standard_normal()).collect())
}

/// Draws `n` i.i.d. uniform samples on `[lo, hi)`.
///
/// Errors if `lo > hi` or either bound is not finite.
pub fn uniform(rng: &mut RngStream, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "uniform: bounds must be finite with lo <= hi, got [{lo}, {hi})"
        )));
    }
    Ok((0..n).map(|_| rng.next_uniform(lo, hi)).collect())
}
