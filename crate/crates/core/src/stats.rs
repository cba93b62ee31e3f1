//! Small numeric helpers: compensated summation, sample statistics,
//! quantiles and bootstrap standard errors.

use crate::rng::RngStream;

/// Kahan compensated accumulator. Exact for integer-valued inputs within
/// f64 range; keeps 10^7-term float sums from drifting.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    let mut acc = KahanSum::default();
    for &x in xs {
        acc.add(x);
    }
    acc.value() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let mut acc = KahanSum::default();
    for &x in xs {
        let d = x - m;
        acc.add(d * d);
    }
    acc.value() / (xs.len() as f64 - 1.0)
}

/// Central sample moment of given order.
pub fn central_moment(xs: &[f64], order: u32) -> f64 {
    let m = mean(xs);
    let mut acc = KahanSum::default();
    for &x in xs {
        acc.add((x - m).powi(order as i32));
    }
    acc.value() / xs.len() as f64
}

/// Standard error of the sample variance, estimated from the data:
/// Var(s^2) ~ (m4 - sigma^4 (n-3)/(n-1)) / n.
pub fn variance_standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m4 = central_moment(xs, 4);
    let s2 = sample_variance(xs);
    ((m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
}

/// Empirical quantile with linear interpolation; q in [0, 1].
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| {
        a.partial_cmp(b)
            .expect("quantile input must not contain NaN")
    });
    let pos = q * (v.len() as f64 - 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
    }
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Standard error of the sample median via the IQR-based normal density
/// approximation.
pub fn median_standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
    let sigma_robust = iqr / 1.3489795003921634;
    1.2533141373155003 * sigma_robust / n.sqrt()
}

/// Sample covariance of paired observations.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let mut acc = KahanSum::default();
    for (&x, &y) in xs.iter().zip(ys) {
        acc.add((x - mx) * (y - my));
    }
    acc.value() / (xs.len() as f64 - 1.0)
}

/// Bootstrap standard error of the sample covariance: resamples replica
/// indices with replacement and reports the standard deviation of the
/// resampled covariances. Deterministic given the stream.
pub fn bootstrap_covariance_se(
    xs: &[f64],
    ys: &[f64],
    resamples: usize,
    stream: &mut RngStream,
) -> f64 {
    let n = xs.len();
    let mut stats = Vec::with_capacity(resamples);
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    for _ in 0..resamples {
        for i in 0..n {
            let j = stream.u64_below(n as u64) as usize;
            bx[i] = xs[j];
            by[i] = ys[j];
        }
        stats.push(sample_covariance(&bx, &by));
    }
    sample_variance(&stats).sqrt()
}
