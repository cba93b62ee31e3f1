//! Deterministic, splittable random streams.
//!
//! Every source of randomness in this crate is an [`RngStream`] identified by
//! a `(seed, stream_id)` pair. Streams are backed by ChaCha12 running in
//! counter mode with the stream id mapped onto the cipher's 64-bit nonce, so
//! distinct ids yield statistically independent sequences and the same pair
//! reproduces the identical sequence on every platform and under any
//! parallel schedule. A stream is owned by exactly one worker at a time.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// A deterministic random stream addressed by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            inner,
            spare_normal: None,
        }
    }

    /// Raw 64-bit draw.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1), 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1]; never returns 0.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(p) using a 64-bit integer threshold.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        // Threshold comparison is exact whenever p*2^64 is an integer
        // (all dyadic p), and within 2^-64 of p otherwise.
        let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
        self.next_u64() < threshold
    }

    /// Uniform integer in [0, bound) by widening-multiply rejection,
    /// free of modulo bias.
    #[inline]
    pub fn u64_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (bound as u128);
            let low = m as u64;
            if low >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform integer in [1, n-1], the repeat-index law at step n.
    #[inline]
    pub fn uniform_past_index(&mut self, n: u64) -> u64 {
        debug_assert!(n >= 2);
        1 + self.u64_below(n - 1)
    }

    /// Standard normal draw by the Marsaglia polar method.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * factor);
                return u * factor;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_pair_same_sequence() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn golden_draws_are_stable() {
        // Frozen output of ChaCha12 for (seed, stream) = (42, 7); any change
        // here breaks replayability of stored traces and configs.
        let mut s = RngStream::new(42, 7);
        assert_eq!(s.next_u64(), 18398896560331411741);
        let mut t = RngStream::new(42, 0);
        assert_eq!(t.next_u64(), 9713269763989775522);
    }

    #[test]
    fn distinct_streams_nearly_uncorrelated() {
        let mut a = RngStream::new(123, 1);
        let mut b = RngStream::new(123, 2);
        let n = 1_000_000;
        let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x = a.uniform();
            let y = b.uniform();
            sa += x;
            sb += y;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
        let nf = n as f64;
        let cov = sab / nf - (sa / nf) * (sb / nf);
        let va = saa / nf - (sa / nf) * (sa / nf);
        let vb = sbb / nf - (sb / nf) * (sb / nf);
        let corr = cov / (va * vb).sqrt();
        assert!(corr.abs() < 0.01, "corr = {corr}");
    }

    #[test]
    fn u64_below_is_in_range_and_covers() {
        let mut s = RngStream::new(1, 1);
        let mut seen = [false; 7];
        for _ in 0..10_000 {
            let v = s.u64_below(7);
            assert!(v < 7);
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn bernoulli_endpoints() {
        let mut s = RngStream::new(9, 9);
        for _ in 0..100 {
            assert!(s.bernoulli(1.0));
            assert!(!s.bernoulli(0.0));
        }
    }

    #[test]
    fn normal_moments() {
        let mut s = RngStream::new(5, 5);
        let n = 200_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let z = s.standard_normal();
            sum += z;
            sum2 += z * z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 5.0 * (2.0f64 / n as f64).sqrt());
    }
}
