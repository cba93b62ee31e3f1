//! Exact finite-n moments of the truncated walks by one-step conditioning.
//!
//! With Z_k the truncated innovation and S* the walk run on {Z_k}, the
//! conditional expectations give linear recursions for E S*(n), E Z-hat_n^2
//! and Var S*(n). All inputs E Z_k, E Z_k^2 are analytic per distribution
//! kind, so the recursions are exact up to f64 rounding.

use crate::config::{Truncation, WalkSign};
use crate::dist::StepDistribution;
use crate::error::{Error, Result};
use serde::Serialize;

/// Growth regime of Var(S*(n)) in n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceRegime {
    /// Positive walk, p < 1/2: Var ~ sigma^2 n / (1-2p).
    Diffusive,
    /// Positive walk, p = 1/2: Var ~ sigma^2 n log n.
    Critical,
    /// Positive walk, p > 1/2: Var = O(n^{2p}).
    SuperDiffusive,
    /// Negative walk, any p: Var ~ sigma_check^2 n / (2p+1).
    Counterbalanced,
}

impl VarianceRegime {
    pub fn for_walk(sign: WalkSign, p: f64) -> Self {
        match sign {
            WalkSign::Negative => VarianceRegime::Counterbalanced,
            WalkSign::Positive if p < 0.5 => VarianceRegime::Diffusive,
            WalkSign::Positive if p == 0.5 => VarianceRegime::Critical,
            WalkSign::Positive => VarianceRegime::SuperDiffusive,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            VarianceRegime::Diffusive => "diffusive sigma^2 n/(1-2p)",
            VarianceRegime::Critical => "critical sigma^2 n log n",
            VarianceRegime::SuperDiffusive => "super-diffusive O(n^{2p})",
            VarianceRegime::Counterbalanced => "counterbalanced sigma_check^2 n/(2p+1)",
        }
    }

    /// The normalizer v(n) such that Var/v(n) approaches a constant.
    pub fn normalizer(self, p: f64, n: u64) -> f64 {
        let nf = n as f64;
        match self {
            VarianceRegime::Diffusive | VarianceRegime::Counterbalanced => nf,
            VarianceRegime::Critical => nf * nf.max(2.0).ln(),
            VarianceRegime::SuperDiffusive => nf.powf(2.0 * p),
        }
    }

    /// The constant Var/v(n) approaches, when the regime pins one down
    /// (None in the super-diffusive regime where only O(n^{2p}) is claimed).
    pub fn limit_constant(self, dist: &StepDistribution, p: f64) -> Option<f64> {
        let m2 = dist.m2().finite()?;
        let m1 = dist.m1();
        match self {
            VarianceRegime::Diffusive => Some((m2 - m1 * m1) / (1.0 - 2.0 * p)),
            VarianceRegime::Critical => Some(m2 - m1 * m1),
            VarianceRegime::SuperDiffusive => None,
            VarianceRegime::Counterbalanced => {
                let mu = (1.0 - p) * m1 / (1.0 + p);
                Some((m2 - mu * mu) / (2.0 * p + 1.0))
            }
        }
    }
}

fn require_moments(dist: &StepDistribution, truncation: Truncation, what: &str) -> Result<()> {
    if truncation == Truncation::None && dist.m2().is_infinite() {
        return Err(Error::SecondMomentRequired(format!(
            "{what} needs E(X^2) < infinity or an active truncation rule"
        )));
    }
    Ok(())
}

/// E S*(n) for n = 1..=n_max (index 0 holds n = 1).
///
/// Positive: E S*(n+1) = ((n+p)/n) E S*(n) + (1-p) E Z_{n+1};
/// negative: the (n-p)/n mirror. Untruncated both collapse to closed forms.
pub fn mean_profile(
    dist: &StepDistribution,
    p: f64,
    sign: WalkSign,
    truncation: Truncation,
    n_max: u64,
) -> Vec<f64> {
    let drift = match sign {
        WalkSign::Positive => p,
        WalkSign::Negative => -p,
    };
    let mut out = Vec::with_capacity(n_max as usize);
    let mut m = dist.truncated_moment(1, truncation.threshold(1));
    out.push(m);
    for n in 1..n_max {
        let nf = n as f64;
        let ez = dist.truncated_moment(1, truncation.threshold(n + 1));
        m = (nf + drift) / nf * m + (1.0 - p) * ez;
        out.push(m);
    }
    out
}

pub fn mean_positive(
    dist: &StepDistribution,
    p: f64,
    truncation: Truncation,
    n_max: u64,
) -> Vec<f64> {
    mean_profile(dist, p, WalkSign::Positive, truncation, n_max)
}

pub fn mean_negative(
    dist: &StepDistribution,
    p: f64,
    truncation: Truncation,
    n_max: u64,
) -> Vec<f64> {
    mean_profile(dist, p, WalkSign::Negative, truncation, n_max)
}

/// E Z-hat_n^2 for n = 1..=n_max:
/// E Z-hat_{n+1}^2 = (p/n) sum_{k<=n} E Z-hat_k^2 + (1-p) E Z_{n+1}^2.
/// Identical for both walk signs (repeats enter squared).
pub fn second_moment_innovation(
    dist: &StepDistribution,
    p: f64,
    truncation: Truncation,
    n_max: u64,
) -> Result<Vec<f64>> {
    require_moments(dist, truncation, "innovation second moment")?;
    let mut out = Vec::with_capacity(n_max as usize);
    let mut q = dist.truncated_moment(2, truncation.threshold(1));
    let mut running = q;
    out.push(q);
    for n in 1..n_max {
        let nf = n as f64;
        let ez2 = dist.truncated_moment(2, truncation.threshold(n + 1));
        q = p / nf * running + (1.0 - p) * ez2;
        running += q;
        out.push(q);
    }
    Ok(out)
}

/// Var S*(n) for n = 1..=n_max by the exact recursions
/// Var(n+1) = ((n+2p)/n) Var(n) + b_{n+1}          (positive)
/// Var(n+1) = ((n-2p)/n) Var(n) + b-check_{n+1}    (negative)
/// with the inhomogeneity built from the running mean and innovation moments.
pub fn variance_profile(
    dist: &StepDistribution,
    p: f64,
    sign: WalkSign,
    truncation: Truncation,
    n_max: u64,
) -> Result<Vec<f64>> {
    require_moments(dist, truncation, "variance recursion")?;
    let mean_sign = match sign {
        WalkSign::Positive => 1.0,
        WalkSign::Negative => -1.0,
    };
    let mut out = Vec::with_capacity(n_max as usize);
    let ez1 = dist.truncated_moment(1, truncation.threshold(1));
    let ez21 = dist.truncated_moment(2, truncation.threshold(1));
    let mut mean = ez1;
    let mut q = ez21; // E Z-hat_n^2
    let mut q_running = q; // sum of E Z-hat_k^2, k <= n
    let mut var = (ez21 - ez1 * ez1).max(0.0);
    out.push(var);
    for n in 1..n_max {
        let nf = n as f64;
        let t = truncation.threshold(n + 1);
        let ez = dist.truncated_moment(1, t);
        let ez2 = dist.truncated_moment(2, t);
        let cond_mean = mean_sign * p / nf * mean + (1.0 - p) * ez;
        let b = p / nf * q_running + (1.0 - p) * ez2 - cond_mean * cond_mean;
        var = (nf + mean_sign * 2.0 * p) / nf * var + b;
        mean = (nf + mean_sign * p) / nf * mean + (1.0 - p) * ez;
        q = p / nf * q_running + (1.0 - p) * ez2;
        q_running += q;
        out.push(var);
    }
    Ok(out)
}

pub fn var_positive(
    dist: &StepDistribution,
    p: f64,
    truncation: Truncation,
    n_max: u64,
) -> Result<Vec<f64>> {
    variance_profile(dist, p, WalkSign::Positive, truncation, n_max)
}

pub fn var_negative(
    dist: &StepDistribution,
    p: f64,
    truncation: Truncation,
    n_max: u64,
) -> Result<Vec<f64>> {
    variance_profile(dist, p, WalkSign::Negative, truncation, n_max)
}

/// One row of a moment table.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub n: u64,
    pub mean: f64,
    pub var: f64,
    /// E Z-hat_n^2 at this n.
    pub innovation_m2: f64,
    /// var / regime normalizer.
    pub normalized_var: f64,
}

/// Exact recursion outputs on a grid of indices.
#[derive(Debug, Clone, Serialize)]
pub struct MomentTable {
    pub sign: WalkSign,
    pub truncation: Truncation,
    pub p: f64,
    pub regime: VarianceRegime,
    pub rows: Vec<MomentRow>,
}

impl MomentTable {
    /// Runs the recursions to the last grid point, keeping grid rows only.
    /// `grid` must be strictly increasing and nonempty.
    pub fn compute(
        dist: &StepDistribution,
        p: f64,
        sign: WalkSign,
        truncation: Truncation,
        grid: &[u64],
    ) -> Result<Self> {
        if grid.is_empty() || !grid.windows(2).all(|w| w[0] < w[1]) || grid[0] == 0 {
            return Err(Error::InvalidConfig(
                "moment grid must be nonempty, strictly increasing, and start at n >= 1".into(),
            ));
        }
        let n_max = *grid.last().unwrap();
        let means = mean_profile(dist, p, sign, truncation, n_max);
        let vars = variance_profile(dist, p, sign, truncation, n_max)?;
        let innov = second_moment_innovation(dist, p, truncation, n_max)?;
        let regime = VarianceRegime::for_walk(sign, p);
        let rows = grid
            .iter()
            .map(|&n| {
                let i = (n - 1) as usize;
                MomentRow {
                    n,
                    mean: means[i],
                    var: vars[i],
                    innovation_m2: innov[i],
                    normalized_var: vars[i] / regime.normalizer(p, n),
                }
            })
            .collect();
        Ok(Self {
            sign,
            truncation,
            p,
            regime,
            rows,
        })
    }
}

/// Asymptotic class of a_{n+1} = ((n+x)/n) a_n + b_{n+1} with b_n -> b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AsymptoticClass {
    /// x < 1: a_n ~ b n / (1 - x).
    Linear { constant: f64 },
    /// x = 1: a_n ~ b n log n.
    LinearLog { constant: f64 },
    /// x > 1: a_n = O(n^x); no limiting constant is claimed.
    Power { exponent: f64 },
}

/// Output of [`recursion_solve`]: the iterates on a dyadic-ish grid, the
/// classified asymptote and the measured agreement at n_max.
#[derive(Debug, Clone, Serialize)]
pub struct RecursionSolution {
    pub x: f64,
    pub class: AsymptoticClass,
    pub final_value: f64,
    /// a_n / (leading target) at n_max; target includes the second-order
    /// constant for x = 1 (b n (log n + gamma - 1) + a_1 n), since the pure
    /// b n log n form converges only at rate 1/log n.
    pub ratio_to_refined: f64,
    /// a_n / (pure leading form) at n_max; approaches 1 slowly for x = 1.
    pub ratio_to_leading: f64,
    /// Drift of a_n / n^x over the last decade (only meaningful for x > 1).
    pub power_ratio_drift: f64,
}

const EULER_GAMMA: f64 = 0.5772156649015329;

/// Iterates the Lemma-style recursion a_{n+1} = ((n+x)/n) a_n + b(n+1)
/// exactly and verifies the asymptotic class at n_max.
pub fn recursion_solve(
    x: f64,
    a1: f64,
    b: impl Fn(u64) -> f64,
    b_limit: f64,
    n_max: u64,
) -> Result<RecursionSolution> {
    if n_max < 10 {
        return Err(Error::InvalidConfig(
            "recursion_solve needs n_max >= 10".into(),
        ));
    }
    let mut a = a1;
    let decade_start = n_max / 10;
    let mut ratio_at_decade_start = 0.0;
    for n in 1..n_max {
        let nf = n as f64;
        a = (nf + x) / nf * a + b(n + 1);
        if n + 1 == decade_start {
            ratio_at_decade_start = a / (decade_start as f64).powf(x);
        }
    }
    let nf = n_max as f64;
    let class = if x < 1.0 {
        AsymptoticClass::Linear {
            constant: b_limit / (1.0 - x),
        }
    } else if x == 1.0 {
        AsymptoticClass::LinearLog { constant: b_limit }
    } else {
        AsymptoticClass::Power { exponent: x }
    };
    let leading = match class {
        AsymptoticClass::Linear { constant } => constant * nf,
        AsymptoticClass::LinearLog { constant } => constant * nf * nf.ln(),
        AsymptoticClass::Power { exponent } => nf.powf(exponent),
    };
    let refined = match class {
        AsymptoticClass::Linear { constant } => constant * nf,
        AsymptoticClass::LinearLog { constant } => {
            constant * nf * (nf.ln() + EULER_GAMMA - 1.0) + a1 * nf
        }
        AsymptoticClass::Power { exponent } => nf.powf(exponent),
    };
    let final_ratio_power = a / nf.powf(x);
    let power_ratio_drift = if ratio_at_decade_start != 0.0 {
        (final_ratio_power / ratio_at_decade_start - 1.0).abs()
    } else {
        f64::NAN
    };
    Ok(RecursionSolution {
        x,
        class,
        final_value: a,
        ratio_to_refined: a / refined,
        ratio_to_leading: a / leading,
        power_ratio_drift,
    })
}
