//! Limiting Gaussian processes and law-of-iterated-logarithm envelopes.
//!
//! The noise-reinforced Brownian motion B-hat(t) has the law of
//! t^p W(t^{1-2p}) / sqrt(1-2p) for p < 1/2, and the counterbalanced
//! B-check(t) the law of t^{-p} W(t^{2p+1}) / sqrt(2p+1); both are sampled
//! through the explicit time change of a standard Brownian path. At t = 0
//! both are 0 by continuity (the variance vanishes there even though the
//! counterbalanced prefactor is singular).

use crate::dist::StepDistribution;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use serde::Serialize;

/// Which Gaussian limit process a path belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GaussianKind {
    StandardBm,
    NoiseReinforcedBm { p: f64 },
    CounterbalancedBm { p: f64 },
}

/// A sampled path on a fixed time grid.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianPath {
    pub kind: GaussianKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("time grid must be nonempty".into()));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidConfig("time grid must start at 0".into()));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidConfig(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn bm_values(grid: &[f64], stream: &mut RngStream) -> Vec<f64> {
    let mut values = Vec::with_capacity(grid.len());
    let mut w = 0.0;
    let mut prev_t = 0.0;
    for &t in grid {
        if t > prev_t {
            w += (t - prev_t).sqrt() * stream.standard_normal();
        }
        values.push(w);
        prev_t = t;
    }
    values
}

/// Samples a standard Brownian motion by cumulative independent Gaussian
/// increments on the grid.
pub fn sample_bm(grid: &[f64], stream: &mut RngStream) -> Result<GaussianPath> {
    check_grid(grid)?;
    Ok(GaussianPath {
        kind: GaussianKind::StandardBm,
        grid: grid.to_vec(),
        values: bm_values(grid, stream),
    })
}

/// Samples the noise-reinforced Brownian motion for p < 1/2 by sampling W on
/// the transformed grid u = t^{1-2p} and rescaling by t^p / sqrt(1-2p).
pub fn sample_noise_reinforced_bm(
    p: f64,
    grid: &[f64],
    stream: &mut RngStream,
) -> Result<GaussianPath> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "noise-reinforced limit exists in the diffusive regime only (p < 1/2), got {p}"
        )));
    }
    check_grid(grid)?;
    let transformed: Vec<f64> = grid.iter().map(|&t| t.powf(1.0 - 2.0 * p)).collect();
    let w = bm_values(&transformed, stream);
    let scale = (1.0 - 2.0 * p).sqrt();
    let values = grid
        .iter()
        .zip(w)
        .map(|(&t, wv)| {
            if t == 0.0 {
                0.0
            } else {
                t.powf(p) * wv / scale
            }
        })
        .collect();
    Ok(GaussianPath {
        kind: GaussianKind::NoiseReinforcedBm { p },
        grid: grid.to_vec(),
        values,
    })
}

/// Samples the counterbalanced Brownian motion via the time change t^{2p+1}
/// and prefactor t^{-p} / sqrt(2p+1); the value at t = 0 is 0 by continuity.
pub fn sample_counterbalanced_bm(
    p: f64,
    grid: &[f64],
    stream: &mut RngStream,
) -> Result<GaussianPath> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "counterbalanced limit requires p in [0, 1), got {p}"
        )));
    }
    check_grid(grid)?;
    let transformed: Vec<f64> = grid.iter().map(|&t| t.powf(2.0 * p + 1.0)).collect();
    let w = bm_values(&transformed, stream);
    let scale = (2.0 * p + 1.0).sqrt();
    let values = grid
        .iter()
        .zip(w)
        .map(|(&t, wv)| {
            if t == 0.0 {
                0.0
            } else {
                t.powf(-p) * wv / scale
            }
        })
        .collect();
    Ok(GaussianPath {
        kind: GaussianKind::CounterbalancedBm { p },
        grid: grid.to_vec(),
        values,
    })
}

/// Closed-form covariance of the limit processes; symmetric in (s, t).
///
/// Noise-reinforced: E B(s)B(t) = t^p s^{1-p} / (1-2p), s <= t;
/// counterbalanced: E B(s)B(t) = s^{1+p} t^{-p} / (2p+1), s <= t;
/// standard BM: min(s, t).
pub fn covariance(kind: GaussianKind, s: f64, t: f64) -> Result<f64> {
    if s < 0.0 || t < 0.0 {
        return Err(Error::InvalidConfig("times must be nonnegative".into()));
    }
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    match kind {
        GaussianKind::StandardBm => Ok(lo),
        GaussianKind::NoiseReinforcedBm { p } => {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "noise-reinforced covariance needs p in [0, 1/2), got {p}"
                )));
            }
            if lo == 0.0 {
                return Ok(0.0);
            }
            Ok(hi.powf(p) * lo.powf(1.0 - p) / (1.0 - 2.0 * p))
        }
        GaussianKind::CounterbalancedBm { p } => {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "counterbalanced covariance needs p in [0, 1), got {p}"
                )));
            }
            if lo == 0.0 {
                return Ok(0.0);
            }
            Ok(lo.powf(1.0 + p) * hi.powf(-p) / (2.0 * p + 1.0))
        }
    }
}

/// The three iterated-logarithm regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LilRegime {
    /// Positive walk, p < 1/2.
    PositiveDiffusive,
    /// Positive walk, p = 1/2.
    PositiveCritical,
    /// Counterbalanced walk.
    Negative,
}

/// Envelope scale family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LilScale {
    /// sqrt(2 n log log n); positive beyond n0 = 3.
    IteratedLog,
    /// sqrt(2 n log n log log log n); positive beyond n0 = 16.
    CriticalIteratedLog,
}

impl LilScale {
    pub fn min_index(self) -> u64 {
        match self {
            LilScale::IteratedLog => 3,
            LilScale::CriticalIteratedLog => 16,
        }
    }

    pub fn eval(self, n: u64) -> f64 {
        assert!(n >= self.min_index(), "scale undefined below n0");
        let nf = n as f64;
        match self {
            LilScale::IteratedLog => (2.0 * nf * nf.ln().ln()).sqrt(),
            LilScale::CriticalIteratedLog => (2.0 * nf * nf.ln() * nf.ln().ln().ln()).sqrt(),
        }
    }
}

/// limsup envelope: the normalized walk's limsup equals `constant` a.s. on
/// the scale `scale`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LilEnvelope {
    pub regime: LilRegime,
    pub constant: f64,
    pub scale: LilScale,
}

impl LilEnvelope {
    /// Centering at index n: m1 n for the positive walk, mu_check n for the
    /// negative one.
    pub fn centering(&self, dist: &StepDistribution, p: f64, n: u64) -> f64 {
        let m1 = dist.m1();
        match self.regime {
            LilRegime::PositiveDiffusive | LilRegime::PositiveCritical => m1 * n as f64,
            LilRegime::Negative => (1.0 - p) * m1 / (1.0 + p) * n as f64,
        }
    }
}

/// The LIL constants: sigma/sqrt(1-2p) (diffusive), sigma (critical),
/// sigma_check/sqrt(2p+1) (negative).
pub fn lil_envelope(regime: LilRegime, p: f64, dist: &StepDistribution) -> Result<LilEnvelope> {
    let m2 = dist.m2().finite().ok_or_else(|| {
        Error::SecondMomentRequired("iterated-logarithm envelope needs E(X^2) < infinity".into())
    })?;
    let m1 = dist.m1();
    let sigma2 = m2 - m1 * m1;
    let (constant, scale) = match regime {
        LilRegime::PositiveDiffusive => {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "diffusive envelope requires p < 1/2, got {p}"
                )));
            }
            ((sigma2 / (1.0 - 2.0 * p)).sqrt(), LilScale::IteratedLog)
        }
        LilRegime::PositiveCritical => {
            if p != 0.5 {
                return Err(Error::InvalidConfig(format!(
                    "critical envelope requires p = 1/2, got {p}"
                )));
            }
            (sigma2.sqrt(), LilScale::CriticalIteratedLog)
        }
        LilRegime::Negative => {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "negative envelope requires p in [0, 1), got {p}"
                )));
            }
            let mu = (1.0 - p) * m1 / (1.0 + p);
            (
                ((m2 - mu * mu) / (2.0 * p + 1.0)).sqrt(),
                LilScale::IteratedLog,
            )
        }
    };
    Ok(LilEnvelope {
        regime,
        constant,
        scale,
    })
}
