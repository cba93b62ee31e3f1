//! The individual theorem checks.
//!
//! Wherever an exact recursion exists (means, variances, covariances), the
//! comparison target comes from the recursion rather than the asymptotic
//! formula; the asymptote is reported alongside in the notes. Pure
//! asymptotic comparisons carry the documented extra allowance.

use super::ks::ks_test_normal;
use super::{CheckSpec, Target, TheoremId, VerificationReport};
use crate::config::{Truncation, WalkConfig, WalkSign};
use crate::dist::StepDistribution;
use crate::engine::monte_carlo::{monte_carlo, parallel_replicas, parallel_replicas_offset};
use crate::engine::walk::{simulate_observed, StepChoice, StepObserver};
use crate::error::{Error, Result};
use crate::limits::{
    lil_envelope, sample_bm, sample_counterbalanced_bm, sample_noise_reinforced_bm, LilRegime,
};
use crate::moments::gamma::{gamma_growth, GammaRatioSeq};
use crate::moments::recursion::{mean_profile, variance_profile, VarianceRegime};
use crate::moments::{enumerate_exact, OracleFunctional};
use crate::rng::RngStream;
use crate::stats;
use std::fmt::Write as _;

const EULER_GAMMA: f64 = 0.5772156649015329;

fn make_dist(spec: &CheckSpec) -> Result<StepDistribution> {
    StepDistribution::new(spec.dist)
}

fn require_finite_m2(dist: &StepDistribution, what: &str) -> Result<f64> {
    dist.m2()
        .finite()
        .ok_or_else(|| Error::SecondMomentRequired(format!("{what} needs E(X^2) < infinity")))
}

/// The variance entering the normalization: sigma^2 for the positive walk,
/// sigma_check^2 for the negative one. Must be positive for any
/// distributional check.
fn normalization_variance(
    dist: &StepDistribution,
    sign: WalkSign,
    p: f64,
    what: &str,
) -> Result<f64> {
    let m2 = require_finite_m2(dist, what)?;
    let v = match sign {
        WalkSign::Positive => m2 - dist.m1() * dist.m1(),
        WalkSign::Negative => {
            let mu = (1.0 - p) * dist.m1() / (1.0 + p);
            m2 - mu * mu
        }
    };
    if v <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "{what} needs a nondegenerate limit scale, got variance {v}"
        )));
    }
    Ok(v)
}

fn sign_name(sign: WalkSign) -> &'static str {
    match sign {
        WalkSign::Positive => "positive",
        WalkSign::Negative => "negative",
    }
}

/// Strong law of large numbers: S(n)/n against m1 (positive) or
/// (1-p) m1 / (1+p) (negative). Finite-variance laws pass when the replica
/// mean sits within 5 SE (plus the exact-recursion bias allowance) of the
/// limit; infinite-variance laws use a median band, single paths a fixed
/// tolerance.
pub fn check_lln(spec: &CheckSpec, parallelism: Option<usize>) -> Result<VerificationReport> {
    let dist = make_dist(spec)?;
    let sign = spec.effective_sign();
    let limit = match sign {
        WalkSign::Positive => dist.m1(),
        WalkSign::Negative => (1.0 - spec.p) * dist.m1() / (1.0 + spec.p),
    };
    let cfg = WalkConfig::to_horizon(spec.p, sign, Truncation::None, spec.n, spec.seed)?;
    let mc = monte_carlo(&dist, &cfg, spec.replicas, parallelism)?;
    let ratios: Vec<f64> = mc
        .final_values()
        .iter()
        .map(|v| v / spec.n as f64)
        .collect();
    let mut notes = format!("{} walk, limit {limit:.6}; ", sign_name(sign));

    let (statistic, standard_error, band) = if spec.replicas == 1 {
        let tol = spec.tolerance.ok_or_else(|| {
            Error::InvalidConfig("single-path LLN check needs an explicit tolerance".into())
        })?;
        let _ = write!(notes, "single path, fixed tolerance {tol}");
        (ratios[0], 0.0, tol)
    } else if dist.m2().is_infinite() {
        let med = stats::median(&ratios);
        let se = stats::median_standard_error(&ratios);
        let allowance = spec.tolerance.unwrap_or(0.0);
        let _ = write!(
            notes,
            "infinite variance: median band 5 SE + allowance {allowance}"
        );
        (med, se, 5.0 * se + allowance)
    } else {
        let mean = stats::mean(&ratios);
        let se = (stats::sample_variance(&ratios) / spec.replicas as f64).sqrt();
        let exact = mean_profile(&dist, spec.p, sign, Truncation::None, spec.n)
            .last()
            .copied()
            .unwrap()
            / spec.n as f64;
        let bias = (exact - limit).abs();
        let _ = write!(
            notes,
            "replica mean, 5 SE + exact-mean bias allowance {bias:.3e}"
        );
        (mean, se, 5.0 * se + bias)
    };
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic,
        target: Target::Value(limit),
        standard_error,
        passed: (statistic - limit).abs() <= band,
        notes,
    })
}

/// Variance growth regimes: Monte Carlo sample variance at n against the
/// exact recursion (4 SE), plus the asymptotic-formula comparison at
/// n = 10^6 (3%, with the Euler-corrected normalizer in the critical
/// regime; ratio-drift bound in the super-diffusive one).
pub fn check_variance_regimes(
    spec: &CheckSpec,
    parallelism: Option<usize>,
) -> Result<VerificationReport> {
    let dist = make_dist(spec)?;
    let sign = spec.sign;
    normalization_variance(&dist, sign, spec.p, "variance-regime check")?;
    let regime = VarianceRegime::for_walk(sign, spec.p);
    let cfg = WalkConfig::to_horizon(spec.p, sign, Truncation::None, spec.n, spec.seed)?;
    let mc = monte_carlo(&dist, &cfg, spec.replicas, parallelism)?;
    let finals = mc.final_values();
    let sample_var = stats::sample_variance(finals);
    let se = stats::variance_standard_error(finals);
    let exact = variance_profile(&dist, spec.p, sign, Truncation::None, spec.n)?
        .last()
        .copied()
        .unwrap();
    let primary_pass = (sample_var - exact).abs() <= 4.0 * se;

    // secondary: exact recursion against the asymptotic formula at 10^6
    let n_asym = 1_000_000u64;
    let profile = variance_profile(&dist, spec.p, sign, Truncation::None, n_asym)?;
    let v_asym = profile[(n_asym - 1) as usize];
    let nf = n_asym as f64;
    let sigma2 = dist.sigma2().unwrap();
    let (secondary_pass, secondary_note) = match regime.limit_constant(&dist, spec.p) {
        Some(c_limit) => {
            let target = match regime {
                // n H_n is n (ln n + gamma) up to O(1); the pure n ln n form
                // is 4% off at 10^6 and would misreport the regime fit
                VarianceRegime::Critical => sigma2 * nf * (nf.ln() + EULER_GAMMA),
                _ => c_limit * regime.normalizer(spec.p, n_asym),
            };
            let ratio = v_asym / target;
            (
                (ratio - 1.0).abs() <= 0.03,
                format!(
                    "asymptote at 1e6: ratio {ratio:.5} (plain-form ratio {:.5})",
                    v_asym / (c_limit * regime.normalizer(spec.p, n_asym))
                ),
            )
        }
        None => {
            let r_lo = profile[(n_asym / 10 - 1) as usize] / regime.normalizer(spec.p, n_asym / 10);
            let r_hi = v_asym / regime.normalizer(spec.p, n_asym);
            let drift = (r_hi / r_lo - 1.0).abs();
            (
                drift <= 0.10,
                format!("super-diffusive ratio drift over last decade {drift:.4}"),
            )
        }
    };

    let normalizer = regime.normalizer(spec.p, spec.n);
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic: sample_var / normalizer,
        target: Target::Value(exact / normalizer),
        standard_error: se / normalizer,
        passed: primary_pass && secondary_pass,
        notes: format!(
            "regime {}; MC vs exact recursion |{:.5} - {:.5}| vs 4 SE = {:.3e}; {}",
            regime.label(),
            sample_var / normalizer,
            exact / normalizer,
            4.0 * se / normalizer,
            secondary_note
        ),
    })
}

/// Marginal CLT at t = 1: KS of the exactly standardized final value against
/// the standard normal. The positive walk at p = 1/2 is routed to the
/// critical check; p > 1/2 has no Gaussian marginal limit.
pub fn check_clt_marginal(
    spec: &CheckSpec,
    parallelism: Option<usize>,
) -> Result<VerificationReport> {
    let sign = spec.effective_sign();
    if sign == WalkSign::Positive && spec.p >= 0.5 {
        if spec.p == 0.5 {
            let mut routed = spec.clone();
            routed.theorem = TheoremId::CriticalMarginal;
            let mut report = check_critical(&routed, parallelism)?;
            report.notes = format!("routed from clt-marginal-pos (p = 1/2); {}", report.notes);
            return Ok(report);
        }
        return Err(Error::InvalidConfig(
            "positive-walk marginal CLT requires p < 1/2 (super-diffusive regime has no Gaussian limit)"
                .into(),
        ));
    }
    let dist = make_dist(spec)?;
    let sigma2 = normalization_variance(&dist, WalkSign::Positive, spec.p, "marginal CLT").ok();
    normalization_variance(&dist, sign, spec.p, "marginal CLT")?;
    let cfg = WalkConfig::to_horizon(spec.p, sign, Truncation::None, spec.n, spec.seed)?;
    let mc = monte_carlo(&dist, &cfg, spec.replicas, parallelism)?;
    let mean_exact = mean_profile(&dist, spec.p, sign, Truncation::None, spec.n)
        .last()
        .copied()
        .unwrap();
    let var_exact = variance_profile(&dist, spec.p, sign, Truncation::None, spec.n)?
        .last()
        .copied()
        .unwrap();
    if var_exact <= 0.0 {
        return Err(Error::InvalidConfig(
            "walk variance vanishes at this horizon; nothing to standardize".into(),
        ));
    }
    let z: Vec<f64> = mc
        .final_values()
        .iter()
        .map(|v| (v - mean_exact) / var_exact.sqrt())
        .collect();
    let ks = ks_test_normal(&z, 0.0, 1.0);
    let (norm_var, limit_var) = match sign {
        WalkSign::Positive => (
            var_exact / (sigma2.unwrap() * spec.n as f64),
            1.0 / (1.0 - 2.0 * spec.p),
        ),
        WalkSign::Negative => {
            let sc2 = normalization_variance(&dist, sign, spec.p, "marginal CLT")?;
            (
                var_exact / (sc2 * spec.n as f64),
                1.0 / (2.0 * spec.p + 1.0),
            )
        }
    };
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic: ks.p_value,
        target: Target::Interval { lo: spec.level, hi: 1.0 },
        standard_error: 0.0,
        passed: ks.p_value >= spec.level,
        notes: format!(
            "{} walk; KS D = {:.5} on exactly standardized values; normalized variance {:.5} (exact recursion) vs {:.5} (limit)",
            sign_name(sign),
            ks.statistic,
            norm_var,
            limit_var
        ),
    })
}

/// Critical regime p = 1/2: KS of (S([nt]) - m1 [nt]) / (sigma sqrt(n log n))
/// at t = 1 and t = 1/2 against the Gaussian marginals of sqrt(t) W(1), with
/// the variance target taken from the exact recursion.
pub fn check_critical(spec: &CheckSpec, parallelism: Option<usize>) -> Result<VerificationReport> {
    if spec.p != 0.5 {
        return Err(Error::InvalidConfig(format!(
            "critical check requires p = 1/2, got {}",
            spec.p
        )));
    }
    let dist = make_dist(spec)?;
    let sigma2 = normalization_variance(&dist, WalkSign::Positive, 0.5, "critical marginal")?;
    let half = (spec.n / 2).max(1);
    let mut checkpoints = vec![half, spec.n];
    checkpoints.dedup();
    let cfg = WalkConfig::new(
        0.5,
        WalkSign::Positive,
        Truncation::None,
        spec.n,
        spec.seed,
        checkpoints.clone(),
    )?;
    let mc = monte_carlo(&dist, &cfg, spec.replicas, parallelism)?;
    let means = mean_profile(&dist, 0.5, WalkSign::Positive, Truncation::None, spec.n);
    let vars = variance_profile(&dist, 0.5, WalkSign::Positive, Truncation::None, spec.n)?;
    let scale2 = sigma2 * spec.n as f64 * (spec.n as f64).ln();

    let mut min_p = f64::INFINITY;
    let mut notes = String::from("critical scaling sqrt(n log n); ");
    for (ci, &cp) in checkpoints.iter().enumerate() {
        let idx = (cp - 1) as usize;
        if vars[idx] <= 0.0 {
            return Err(Error::InvalidConfig(
                "walk variance vanishes at a checkpoint; nothing to standardize".into(),
            ));
        }
        let z: Vec<f64> = mc
            .values_at(ci)
            .iter()
            .map(|v| (v - means[idx]) / vars[idx].sqrt())
            .collect();
        let ks = ks_test_normal(&z, 0.0, 1.0);
        min_p = min_p.min(ks.p_value);
        let t = cp as f64 / spec.n as f64;
        let _ = write!(
            notes,
            "t={t:.2}: KS D={:.5} p={:.4}, exact variance/(sigma^2 n log n) = {:.5} vs t = {:.2}; ",
            ks.statistic,
            ks.p_value,
            vars[idx] / scale2,
            t
        );
    }
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic: min_p,
        target: Target::Interval {
            lo: spec.level,
            hi: 1.0,
        },
        standard_error: 0.0,
        passed: min_p >= spec.level,
        notes,
    })
}

/// FCLT covariance structure: the empirical covariance of the normalized
/// walk on a (s, t) grid against the exact-recursion covariance
/// Cov(S(m), S(n)) = Var(S(m)) gamma_{m,n}(+-p); every grid cell must land
/// within 4 bootstrap standard errors.
pub fn check_fclt_covariance(
    spec: &CheckSpec,
    parallelism: Option<usize>,
) -> Result<VerificationReport> {
    let sign = spec.effective_sign();
    if sign == WalkSign::Positive && spec.p >= 0.5 {
        return Err(Error::InvalidConfig(
            "positive-walk covariance check requires the diffusive regime p < 1/2".into(),
        ));
    }
    let dist = make_dist(spec)?;
    let norm2 = normalization_variance(&dist, sign, spec.p, "covariance check")?;
    let x = match sign {
        WalkSign::Positive => spec.p,
        WalkSign::Negative => -spec.p,
    };
    let mut checkpoints: Vec<u64> = spec
        .grid
        .iter()
        .map(|t| ((spec.n as f64 * t).floor() as u64).max(1))
        .collect();
    checkpoints.dedup();
    if checkpoints.len() != spec.grid.len() {
        return Err(Error::InvalidConfig(
            "covariance grid collapses at this n; increase n or spread the grid".into(),
        ));
    }
    let cfg = WalkConfig::new(
        spec.p,
        sign,
        Truncation::None,
        spec.n,
        spec.seed,
        checkpoints.clone(),
    )?;
    let mc = monte_carlo(&dist, &cfg, spec.replicas, parallelism)?;
    let means = mean_profile(&dist, spec.p, sign, Truncation::None, spec.n);
    let vars = variance_profile(&dist, spec.p, sign, Truncation::None, spec.n)?;
    let denom = norm2 * spec.n as f64;

    // normalized values per checkpoint
    let normalized: Vec<Vec<f64>> = checkpoints
        .iter()
        .enumerate()
        .map(|(ci, &cp)| {
            let idx = (cp - 1) as usize;
            mc.values_at(ci)
                .iter()
                .map(|v| (v - means[idx]) / denom.sqrt())
                .collect()
        })
        .collect();

    let mut boot = RngStream::new(spec.seed, spec.replicas + 1);
    let mut worst = 0.0f64;
    let mut notes = format!("{} walk; exact-recursion targets; ", sign_name(sign));
    for i in 0..checkpoints.len() {
        for j in i..checkpoints.len() {
            let (m, n_idx) = (checkpoints[i], checkpoints[j]);
            let emp = stats::sample_covariance(&normalized[i], &normalized[j]);
            let target = vars[(m - 1) as usize] * gamma_growth(m, n_idx, x)? / denom;
            let se = stats::bootstrap_covariance_se(&normalized[i], &normalized[j], 200, &mut boot);
            let zscore = (emp - target).abs() / se;
            worst = worst.max(zscore);
            let (s_t, t_t) = (spec.grid[i], spec.grid[j]);
            let asym = match sign {
                WalkSign::Positive => {
                    t_t.powf(spec.p) * s_t.powf(1.0 - spec.p) / (1.0 - 2.0 * spec.p)
                }
                WalkSign::Negative => {
                    s_t.powf(1.0 + spec.p) * t_t.powf(-spec.p) / (2.0 * spec.p + 1.0)
                }
            };
            let _ = write!(
                notes,
                "(s={s_t},t={t_t}): emp {emp:.4} target {target:.4} (asym {asym:.4}) z {zscore:.2}; "
            );
        }
    }
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic: worst,
        target: Target::Interval { lo: 0.0, hi: 4.0 },
        standard_error: 1.0,
        passed: worst <= 4.0,
        notes,
    })
}

/// Frozen relative margins of the LIL band around the limit-process
/// calibration quantiles. For the classical p = 0 control (calibration
/// process = plain Brownian motion, median 0.4306 c, q95 1.0510 c) these
/// reproduce the bands 0.40 c and 1.25 c.
const LIL_LOWER_MARGIN: f64 = 0.93;
const LIL_UPPER_MARGIN: f64 = 1.19;
const LIL_CALIBRATION_REPLICAS: u64 = 100_000;

/// Property-based LIL band check. The almost-sure limsup is not reproducible
/// at finite n; instead the running maximum M* of the envelope-normalized
/// deviation across 7 dyadic checkpoints is compared, over replicas, against
/// the same functional of the matching time-changed Brownian limit process,
/// with frozen heuristic margins: median(M*) >= 0.93 median_cal and
/// q95(M*) <= 1.19 q95_cal. The reinforced functionals are more strongly
/// correlated across dyadic scales than plain Brownian motion, so the
/// calibration must use the matching limit process, not the classical one.
pub fn check_lil_band(spec: &CheckSpec, parallelism: Option<usize>) -> Result<VerificationReport> {
    let dist = make_dist(spec)?;
    let sign = spec.sign;
    normalization_variance(&dist, sign, spec.p, "LIL band check")?;
    let regime = match (sign, spec.p) {
        (WalkSign::Positive, p) if p < 0.5 => LilRegime::PositiveDiffusive,
        (WalkSign::Positive, p) if p == 0.5 => LilRegime::PositiveCritical,
        (WalkSign::Positive, _) => {
            return Err(Error::InvalidConfig(
                "no LIL envelope in the super-diffusive regime".into(),
            ))
        }
        (WalkSign::Negative, _) => LilRegime::Negative,
    };
    let envelope = lil_envelope(regime, spec.p, &dist)?;
    let k_top = 63 - spec.n.leading_zeros() as u64; // floor(log2 n)
    if k_top < 10 {
        return Err(Error::InvalidConfig(
            "LIL band check needs n >= 1024".into(),
        ));
    }
    let checkpoints: Vec<u64> = (k_top - 6..=k_top).map(|k| 1u64 << k).collect();
    if checkpoints[0] < envelope.scale.min_index() {
        return Err(Error::InvalidConfig(
            "dyadic checkpoints below the scale's n0".into(),
        ));
    }
    let horizon = 1u64 << k_top;
    let cfg = WalkConfig::new(
        spec.p,
        sign,
        Truncation::None,
        horizon,
        spec.seed,
        checkpoints.clone(),
    )?;
    let mc = monte_carlo(&dist, &cfg, spec.replicas, parallelism)?;
    let c = envelope.constant;
    let mstars: Vec<f64> = (0..mc.replicas())
        .map(|r| {
            checkpoints
                .iter()
                .enumerate()
                .map(|(ci, &cp)| {
                    (mc.values_at(ci)[r] - envelope.centering(&dist, spec.p, cp))
                        / envelope.scale.eval(cp)
                })
                .fold(f64::NEG_INFINITY, f64::max)
                / c
        })
        .collect();

    // Calibration: the identical functional of the limit process, on
    // auxiliary streams after the replica range.
    let p = spec.p;
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain(checkpoints.iter().map(|&cp| cp as f64))
        .collect();
    let scales: Vec<f64> = checkpoints
        .iter()
        .map(|&cp| envelope.scale.eval(cp))
        .collect();
    let log_grid: Vec<f64> = std::iter::once(0.0)
        .chain(checkpoints.iter().map(|&cp| (cp as f64).ln()))
        .collect();
    let cal = parallel_replicas_offset(
        spec.seed,
        spec.replicas + 1,
        LIL_CALIBRATION_REPLICAS,
        parallelism,
        |_, stream| -> f64 {
            match regime {
                LilRegime::PositiveDiffusive => {
                    // (S(n) - m1 n)/sigma converges to the noise-reinforced BM
                    let path = sample_noise_reinforced_bm(p, &grid, stream).expect("valid grid");
                    let f = (1.0 - 2.0 * p).sqrt();
                    path.values[1..]
                        .iter()
                        .zip(&scales)
                        .map(|(v, s)| v * f / s)
                        .fold(f64::NEG_INFINITY, f64::max)
                }
                LilRegime::Negative => {
                    let path = sample_counterbalanced_bm(p, &grid, stream).expect("valid grid");
                    let f = (2.0 * p + 1.0).sqrt();
                    path.values[1..]
                        .iter()
                        .zip(&scales)
                        .map(|(v, s)| v * f / s)
                        .fold(f64::NEG_INFINITY, f64::max)
                }
                LilRegime::PositiveCritical => {
                    // (S(n) - m1 n)/(sigma sqrt(n)) tracks W(log n)
                    let path = sample_bm(&log_grid, stream).expect("valid grid");
                    path.values[1..]
                        .iter()
                        .zip(&checkpoints)
                        .map(|(w, &cp)| {
                            let nf = cp as f64;
                            w * nf.sqrt() / envelope.scale.eval(cp)
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                }
            }
        },
    )?;

    let walk_med = stats::median(&mstars);
    let walk_q95 = stats::quantile(&mstars, 0.95);
    let cal_med = stats::median(&cal);
    let cal_q95 = stats::quantile(&cal, 0.95);
    let lower = LIL_LOWER_MARGIN * cal_med;
    let upper = LIL_UPPER_MARGIN * cal_q95;
    // band utilization: <= 1 iff both frozen-margin conditions hold
    let med_use = if walk_med > 0.0 {
        lower / walk_med
    } else {
        2.0 + walk_med.abs()
    };
    let q95_use = walk_q95 / upper;
    let statistic = med_use.max(q95_use);
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic,
        target: Target::Interval { lo: 0.0, hi: 1.0 },
        standard_error: stats::median_standard_error(&mstars),
        passed: statistic <= 1.0,
        notes: format!(
            "a.s. limsup not reproducible at finite n: heuristic frozen margins around the limit-process calibration; constant {c:.5}, dyadic checkpoints 2^{}..2^{}; walk median/c {walk_med:.4} vs lower {lower:.4} (= {LIL_LOWER_MARGIN} x cal {cal_med:.4}), walk q95/c {walk_q95:.4} vs upper {upper:.4} (= {LIL_UPPER_MARGIN} x cal {cal_q95:.4})",
            k_top - 6,
            k_top
        ),
    })
}

struct MartingaleObserver<'a> {
    p: f64,
    mean_sign: f64,
    c: f64,
    ez: &'a [f64],
    a: &'a [f64],
    s2: &'a [f64],
    values: Vec<f64>,
    running: stats::KahanSum,
    sum_y2: f64,
    cond2: f64,
    cond3: f64,
    cond2_mid: f64,
    cond3_mid: f64,
    mid: u64,
}

impl StepObserver for MartingaleObserver<'_> {
    #[inline]
    fn on_step(&mut self, index: u64, choice: StepChoice) {
        let i = (index - 1) as usize;
        let value = match choice {
            StepChoice::Fresh { x } => x,
            StepChoice::Repeat { u } => {
                let past = self.values[(u - 1) as usize];
                if self.mean_sign < 0.0 {
                    -past
                } else {
                    past
                }
            }
        };
        let cond_mean = if index == 1 {
            self.ez[0]
        } else {
            self.mean_sign * self.p / (index as f64 - 1.0) * self.running.value()
                + (1.0 - self.p) * self.ez[i]
        };
        let y = self.a[i] * (value - cond_mean);
        self.sum_y2 += y * y;
        // s_k = 0 only while every innovation so far is censored, and then
        // Y_k = 0 as well; the condition sums start at the first s_k > 0
        if self.s2[i] > 0.0 {
            let sk = self.s2[i].sqrt();
            if y.abs() > self.c * sk {
                self.cond2 += y.abs() / sk;
            } else {
                self.cond3 += y.powi(4) / (self.s2[i] * self.s2[i]);
            }
        }
        if index == self.mid {
            self.cond2_mid = self.cond2;
            self.cond3_mid = self.cond3;
        }
        self.values.push(value);
        self.running.add(value);
    }
}

/// Empirical diagnostics for the martingale invariance-principle conditions
/// on the scaled truncated walk: (i) sum Y_k^2 / s_n^2 near 1, (ii)/(iii)
/// partial-sum plateaus (tail increment over the last decade below 1%).
/// These are necessary-condition diagnostics; summability cannot be
/// concluded at finite n.
pub fn check_martingale_conditions(
    spec: &CheckSpec,
    parallelism: Option<usize>,
) -> Result<VerificationReport> {
    if spec.truncation != Truncation::Sqrt {
        return Err(Error::InvalidConfig(
            "martingale diagnostics are defined for the sqrt-truncated walk".into(),
        ));
    }
    let sign = spec.sign;
    if sign == WalkSign::Positive && spec.p >= 0.5 {
        return Err(Error::InvalidConfig(
            "martingale scale s_n diverges only for p < 1/2 on the positive walk".into(),
        ));
    }
    if spec.n < 100 {
        return Err(Error::InvalidConfig(
            "martingale diagnostics need n >= 100".into(),
        ));
    }
    let dist = make_dist(spec)?;
    require_finite_m2(&dist, "martingale diagnostics")?;
    if dist.sigma2().unwrap_or(0.0) <= 0.0 {
        return Err(Error::InvalidConfig(
            "martingale diagnostics need a nondegenerate step law (sigma^2 > 0)".into(),
        ));
    }
    let x = match sign {
        WalkSign::Positive => spec.p,
        WalkSign::Negative => -spec.p,
    };
    let mean_sign = if sign == WalkSign::Positive {
        1.0
    } else {
        -1.0
    };
    let c = 1.0; // threshold constant in conditions (ii)/(iii)

    let n = spec.n;
    let ez: Vec<f64> = (1..=n)
        .map(|k| dist.truncated_moment(1, Truncation::Sqrt.threshold(k)))
        .collect();
    let a = GammaRatioSeq::new(x, n)?;
    let vars = variance_profile(&dist, spec.p, sign, Truncation::Sqrt, n)?;
    let s2: Vec<f64> = vars
        .iter()
        .zip(a.values())
        .map(|(v, ak)| v * ak * ak)
        .collect();

    let cfg = WalkConfig::to_horizon(spec.p, sign, Truncation::Sqrt, n, spec.seed)?;
    let per_replica = parallel_replicas(spec.seed, spec.replicas, parallelism, |_, stream| {
        let mut obs = MartingaleObserver {
            p: spec.p,
            mean_sign,
            c,
            ez: &ez,
            a: a.values(),
            s2: &s2,
            values: Vec::with_capacity(n as usize),
            running: stats::KahanSum::default(),
            sum_y2: 0.0,
            cond2: 0.0,
            cond3: 0.0,
            cond2_mid: 0.0,
            cond3_mid: 0.0,
            mid: n / 10,
        };
        simulate_observed(&dist, &cfg, stream, &mut obs).expect("validated config");
        (
            obs.sum_y2 / s2[(n - 1) as usize],
            obs.cond2,
            obs.cond2_mid,
            obs.cond3,
            obs.cond3_mid,
        )
    })?;

    let ratios: Vec<f64> = per_replica.iter().map(|r| r.0).collect();
    let ratio_mean = stats::mean(&ratios);
    let se = (stats::sample_variance(&ratios) / spec.replicas as f64).sqrt();
    let tail = |total: f64, mid: f64| {
        if total <= f64::EPSILON {
            0.0
        } else {
            (total - mid) / total
        }
    };
    let c2_total = stats::mean(&per_replica.iter().map(|r| r.1).collect::<Vec<_>>());
    let c2_mid = stats::mean(&per_replica.iter().map(|r| r.2).collect::<Vec<_>>());
    let c3_total = stats::mean(&per_replica.iter().map(|r| r.3).collect::<Vec<_>>());
    let c3_mid = stats::mean(&per_replica.iter().map(|r| r.4).collect::<Vec<_>>());
    let tail2 = tail(c2_total, c2_mid);
    let tail3 = tail(c3_total, c3_mid);
    let pass_i = (ratio_mean - 1.0).abs() <= 0.05;
    let pass_ii = tail2 < 0.01;
    let pass_iii = tail3 < 0.01;
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic: ratio_mean,
        target: Target::Value(1.0),
        standard_error: se,
        passed: pass_i && pass_ii && pass_iii,
        notes: format!(
            "(i) sum Y^2 / s_n^2 = {ratio_mean:.4} (band 1 +- 0.05); (ii) partial sum {c2_total:.4e}, last-decade increment {tail2:.2e} (< 1e-2); (iii) partial sum {c3_total:.4e}, increment {tail3:.2e} (< 1e-2); c = {c}; necessary-condition diagnostics only"
        ),
    })
}

struct LastValueObserver {
    values: Vec<f64>,
    negate_repeats: bool,
    last: f64,
}

impl StepObserver for LastValueObserver {
    #[inline]
    fn on_step(&mut self, _index: u64, choice: StepChoice) {
        let value = match choice {
            StepChoice::Fresh { x } => x,
            StepChoice::Repeat { u } => {
                let past = self.values[(u - 1) as usize];
                if self.negate_repeats {
                    -past
                } else {
                    past
                }
            }
        };
        self.values.push(value);
        self.last = value;
    }
}

/// Even-moment identity and truncation inequality for the innovation value:
/// E Z-hat_n^{2m} = E Z-check_n^{2m} <= E Z_n^{2m}, m in {1, 2}. Exact via
/// the enumeration oracle for finite-support laws at n <= 7, Monte Carlo
/// with a 4 SE band otherwise.
pub fn check_moment_inequality(
    spec: &CheckSpec,
    parallelism: Option<usize>,
) -> Result<VerificationReport> {
    let dist = make_dist(spec)?;
    let threshold = spec.truncation.threshold(spec.n);
    let exact = dist.finite_support().is_some() && spec.n <= 7;
    if exact {
        let pos = enumerate_exact(
            &dist,
            spec.p,
            WalkSign::Positive,
            spec.truncation,
            spec.n,
            OracleFunctional::StepValue,
        )?;
        let neg = enumerate_exact(
            &dist,
            spec.p,
            WalkSign::Negative,
            spec.truncation,
            spec.n,
            OracleFunctional::StepValue,
        )?;
        let mut worst = 0.0f64;
        let mut notes = String::from("exact enumeration; ");
        for m in [1u32, 2] {
            let a = pos.moment(2 * m);
            let b = neg.moment(2 * m);
            let bound = dist.truncated_moment(2 * m, threshold);
            worst = worst.max((a - b).abs()).max(a - bound);
            let _ = write!(
                notes,
                "m={m}: E pos {a:.6} = E neg {b:.6} <= E Z {bound:.6}; "
            );
        }
        let tol = 1e-12;
        return Ok(VerificationReport {
            spec: spec.clone(),
            statistic: worst.max(0.0),
            target: Target::Interval { lo: 0.0, hi: tol },
            standard_error: 0.0,
            passed: worst <= tol,
            notes,
        });
    }

    require_finite_m2(&dist, "Monte Carlo moment inequality")?;
    let run = |sign: WalkSign, offset: u64| -> Result<Vec<f64>> {
        let cfg = WalkConfig::to_horizon(spec.p, sign, spec.truncation, spec.n, spec.seed)?;
        parallel_replicas_offset(
            spec.seed,
            offset,
            spec.replicas,
            parallelism,
            |_, stream| {
                let mut obs = LastValueObserver {
                    values: Vec::with_capacity(spec.n as usize),
                    negate_repeats: sign == WalkSign::Negative,
                    last: 0.0,
                };
                simulate_observed(&dist, &cfg, stream, &mut obs).expect("validated config");
                obs.last
            },
        )
    };
    let pos = run(WalkSign::Positive, 0)?;
    let neg = run(WalkSign::Negative, spec.replicas + 1)?;
    let mut worst_z = 0.0f64;
    let mut notes = String::from("Monte Carlo, 4 SE bands; ");
    for m in [1u32, 2] {
        let pow = |xs: &[f64]| {
            xs.iter()
                .map(|v| v.powi(2 * m as i32))
                .collect::<Vec<f64>>()
        };
        let (pp, nn) = (pow(&pos), pow(&neg));
        let (mp, mn) = (stats::mean(&pp), stats::mean(&nn));
        let se_p = (stats::sample_variance(&pp) / spec.replicas as f64).sqrt();
        let se_n = (stats::sample_variance(&nn) / spec.replicas as f64).sqrt();
        let se_d = (se_p * se_p + se_n * se_n).sqrt();
        let bound = dist.truncated_moment(2 * m, threshold);
        let z_eq = (mp - mn).abs() / se_d;
        let z_ineq = (mp - bound) / se_p;
        worst_z = worst_z.max(z_eq).max(z_ineq);
        let _ = write!(
            notes,
            "m={m}: pos {mp:.5} neg {mn:.5} (z_eq {z_eq:.2}) bound {bound:.5} (z_ineq {z_ineq:.2}); "
        );
    }
    Ok(VerificationReport {
        spec: spec.clone(),
        statistic: worst_z.max(0.0),
        target: Target::Interval { lo: 0.0, hi: 4.0 },
        standard_error: 1.0,
        passed: worst_z <= 4.0,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::StepKind;

    fn spec(
        theorem: TheoremId,
        dist: StepKind,
        p: f64,
        n: u64,
        replicas: u64,
        seed: u64,
    ) -> CheckSpec {
        CheckSpec::new(theorem, dist, p, n, replicas, seed)
    }

    #[test]
    fn lln_constant_negative_single_path() {
        let s = spec(
            TheoremId::LlnNeg,
            StepKind::Constant { c: 1.0 },
            1.0 / 3.0,
            100_000,
            1,
            2024,
        )
        .with_tolerance(0.02);
        let r = check_lln(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        match r.target {
            Target::Value(v) => assert!((v - 0.5).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn lln_rademacher_positive_replicas() {
        let s = spec(
            TheoremId::LlnPos,
            StepKind::Rademacher,
            0.3,
            20_000,
            200,
            11,
        );
        let r = check_lln(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        assert_eq!(r.target, Target::Value(0.0));
    }

    #[test]
    fn lln_pareto_median_band() {
        let s = spec(
            TheoremId::LlnPos,
            StepKind::Pareto {
                alpha: 1.5,
                scale: 1.0,
            },
            0.3,
            50_000,
            200,
            12,
        )
        .with_tolerance(0.3);
        let r = check_lln(&s, None).unwrap();
        assert!(r.passed, "statistic {} notes {}", r.statistic, r.notes);
    }

    #[test]
    fn variance_regimes_diffusive() {
        let s = spec(
            TheoremId::VarRegimes,
            StepKind::Rademacher,
            0.25,
            20_000,
            2_000,
            13,
        );
        let r = check_variance_regimes(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
    }

    #[test]
    fn variance_regimes_negative_critical_p() {
        let s = spec(
            TheoremId::VarRegimes,
            StepKind::Rademacher,
            0.5,
            20_000,
            2_000,
            14,
        )
        .with_sign(WalkSign::Negative);
        let r = check_variance_regimes(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        // negative p=1/2 Rademacher: Var(n)/n = 1/2 exactly
        match r.target {
            Target::Value(v) => assert!((v - 0.5).abs() < 1e-9),
            _ => panic!(),
        }
    }

    #[test]
    fn variance_regimes_super_diffusive() {
        let s = spec(
            TheoremId::VarRegimes,
            StepKind::Rademacher,
            0.75,
            20_000,
            1_000,
            15,
        );
        let r = check_variance_regimes(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        assert!(r.notes.contains("super-diffusive"));
    }

    #[test]
    fn clt_marginal_both_signs() {
        let s = spec(
            TheoremId::CltMarginalPos,
            StepKind::Rademacher,
            0.25,
            20_000,
            2_000,
            16,
        );
        let r = check_clt_marginal(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);

        let s = spec(
            TheoremId::CltMarginalNeg,
            StepKind::Rademacher,
            0.5,
            20_000,
            2_000,
            17,
        );
        let r = check_clt_marginal(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
    }

    #[test]
    fn clt_p0_is_classical() {
        let s = spec(
            TheoremId::CltMarginalPos,
            StepKind::Gaussian { mean: 0.0, sd: 1.0 },
            0.0,
            5_000,
            2_000,
            18,
        );
        let r = check_clt_marginal(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
    }

    #[test]
    fn clt_routes_critical_at_half() {
        let s = spec(
            TheoremId::CltMarginalPos,
            StepKind::Rademacher,
            0.5,
            20_000,
            1_000,
            19,
        );
        let r = check_clt_marginal(&s, None).unwrap();
        assert!(r.notes.contains("routed"));
        let s = spec(
            TheoremId::CltMarginalPos,
            StepKind::Rademacher,
            0.75,
            1_000,
            100,
            19,
        );
        assert!(check_clt_marginal(&s, None).is_err());
    }

    #[test]
    fn fclt_covariance_small() {
        let s = spec(
            TheoremId::FcltCovPos,
            StepKind::Rademacher,
            0.25,
            20_000,
            2_000,
            20,
        );
        let r = check_fclt_covariance(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);

        let s = spec(
            TheoremId::FcltCovNeg,
            StepKind::Rademacher,
            0.5,
            20_000,
            2_000,
            21,
        );
        let r = check_fclt_covariance(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
    }

    #[test]
    fn lil_band_smoke() {
        let s = spec(
            TheoremId::LilBand,
            StepKind::Rademacher,
            0.25,
            1 << 15,
            200,
            22,
        );
        let r = check_lil_band(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
    }

    #[test]
    fn martingale_conditions_smoke() {
        let s = spec(
            TheoremId::MartingaleConditions,
            StepKind::Rademacher,
            0.25,
            50_000,
            8,
            23,
        );
        let r = check_martingale_conditions(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);

        let mut bad = s.clone();
        bad.truncation = Truncation::None;
        assert!(check_martingale_conditions(&bad, None).is_err());
    }

    #[test]
    fn martingale_iid_case() {
        // p = 0 reduces Y_k to centered i.i.d. draws: the stationary ergodic
        // martingale difference case
        let s = spec(
            TheoremId::MartingaleConditions,
            StepKind::Gaussian { mean: 0.0, sd: 1.0 },
            0.0,
            50_000,
            8,
            24,
        );
        let r = check_martingale_conditions(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
    }

    #[test]
    fn moment_inequality_exact_and_mc() {
        let s = spec(
            TheoremId::MomentInequality,
            StepKind::TwoPoint {
                a: 0.0,
                b: 3.0,
                prob_a: 0.5,
            },
            0.5,
            5,
            1,
            25,
        );
        let r = check_moment_inequality(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        assert!(r.notes.contains("exact"));

        let s = spec(
            TheoremId::MomentInequality,
            StepKind::Gaussian { mean: 0.0, sd: 1.0 },
            0.5,
            2_000,
            2_000,
            26,
        );
        let r = check_moment_inequality(&s, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        assert!(r.notes.contains("Monte Carlo"));
    }

    #[test]
    fn p_zero_reduces_to_classical_checks() {
        let v = spec(
            TheoremId::VarRegimes,
            StepKind::Gaussian { mean: 0.0, sd: 1.5 },
            0.0,
            5_000,
            1_000,
            28,
        );
        let r = check_variance_regimes(&v, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        // classical i.i.d.: Var(n) = n sigma^2 exactly
        match r.target {
            Target::Value(t) => assert!((t - 2.25).abs() < 1e-9),
            _ => panic!(),
        }

        let f = spec(
            TheoremId::FcltCovPos,
            StepKind::Rademacher,
            0.0,
            10_000,
            1_000,
            29,
        );
        let r = check_fclt_covariance(&f, None).unwrap();
        assert!(r.passed, "{}", r.notes);
        // BM covariance min(s,t) shows up in the notes targets
        assert!(r.notes.contains("asym 0.2500"), "{}", r.notes);
    }

    #[test]
    fn reports_are_recomputable_from_spec() {
        let s = spec(
            TheoremId::CltMarginalNeg,
            StepKind::Rademacher,
            0.5,
            5_000,
            500,
            27,
        );
        let a = check_clt_marginal(&s, Some(1)).unwrap();
        let b = check_clt_marginal(&s, Some(4)).unwrap();
        assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
        assert_eq!(a.passed, b.passed);
        assert_eq!(a.notes, b.notes);
    }

    #[test]
    fn standardization_invariance_seed_matched() {
        // X = m + s R with the same stream reproduces the Rademacher walk
        // affinely: standardized statistics agree exactly path by path.
        use crate::engine::walk::simulate;
        let (m, s_) = (0.7, 2.5);
        let affine = StepDistribution::two_point(m + s_, m - s_, 0.5).unwrap();
        let rad = StepDistribution::rademacher();
        for seed in 0..5 {
            let cfg =
                WalkConfig::to_horizon(0.3, WalkSign::Positive, Truncation::None, 2_000, seed)
                    .unwrap();
            let mut s1 = RngStream::new(seed, 1);
            let mut s2 = RngStream::new(seed, 1);
            let a = simulate(&affine, &cfg, &mut s1).unwrap();
            let r = simulate(&rad, &cfg, &mut s2).unwrap();
            let standardized = (a.final_value - m * 2_000.0) / s_;
            assert!((standardized - r.final_value).abs() < 1e-9);
        }
    }
}
