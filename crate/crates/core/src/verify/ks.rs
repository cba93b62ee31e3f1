//! One-sample Kolmogorov-Smirnov test against a Gaussian target, with
//! p-values from the asymptotic Kolmogorov distribution.

use crate::dist::normal_cdf;

/// sup-norm distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("KS input must not contain NaN"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup
            .max((f - i as f64 / n).abs())
            .max(((i as f64 + 1.0) / n - f).abs());
    }
    sup
}

/// Survival function of the Kolmogorov distribution, P(K > x).
///
/// Uses the theta-series form below x = 1.18 and the alternating
/// exponential series above; both truncations are far below f64 precision
/// at the switch point.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        let t = (-std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x)).exp();
        // K(x) = sqrt(2 pi)/x * (t + t^9 + t^25 + ...)
        let cdf =
            (2.0 * std::f64::consts::PI).sqrt() / x * (t + t.powi(9) + t.powi(25) + t.powi(49));
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let u = (-2.0 * x * x).exp();
        // Q(x) = 2 (u - u^4 + u^9 - u^16 + ...)
        (2.0 * (u - u.powi(4) + u.powi(9) - u.powi(16))).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// KS test of `samples` against Normal(mean, variance).
pub fn ks_test_normal(samples: &[f64], mean: f64, variance: f64) -> KsOutcome {
    let sd = variance.sqrt();
    let statistic = ks_statistic(samples, |x| normal_cdf((x - mean) / sd));
    let p_value = kolmogorov_sf((samples.len() as f64).sqrt() * statistic);
    KsOutcome { statistic, p_value }
}
