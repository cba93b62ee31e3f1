//! Statistical harness turning the limit theorems into seeded, reproducible
//! pass/fail checks with explicit confidence bands.
//!
//! Every check is fully determined by its [`CheckSpec`]; rerunning a spec
//! reproduces the report bit-for-bit whatever the thread count. Replicas run
//! on streams (seed, 1..=replicas); auxiliary randomness (bootstrap
//! resampling) uses stream replicas+1.

pub mod checks;
pub mod ks;

use crate::config::{Truncation, WalkSign};
use crate::dist::StepKind;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use ks::{kolmogorov_sf, ks_statistic, ks_test_normal, KsOutcome};

/// Which theorem-level claim a check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    LlnPos,
    LlnNeg,
    VarRegimes,
    CltMarginalPos,
    CltMarginalNeg,
    FcltCovPos,
    FcltCovNeg,
    CriticalMarginal,
    LilBand,
    MartingaleConditions,
    MomentInequality,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::LlnPos,
        TheoremId::LlnNeg,
        TheoremId::VarRegimes,
        TheoremId::CltMarginalPos,
        TheoremId::CltMarginalNeg,
        TheoremId::FcltCovPos,
        TheoremId::FcltCovNeg,
        TheoremId::CriticalMarginal,
        TheoremId::LilBand,
        TheoremId::MartingaleConditions,
        TheoremId::MomentInequality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::LlnPos => "lln-pos",
            TheoremId::LlnNeg => "lln-neg",
            TheoremId::VarRegimes => "var-regimes",
            TheoremId::CltMarginalPos => "clt-marginal-pos",
            TheoremId::CltMarginalNeg => "clt-marginal-neg",
            TheoremId::FcltCovPos => "fclt-cov-pos",
            TheoremId::FcltCovNeg => "fclt-cov-neg",
            TheoremId::CriticalMarginal => "critical-marginal",
            TheoremId::LilBand => "lil-band",
            TheoremId::MartingaleConditions => "martingale-conditions",
            TheoremId::MomentInequality => "moment-inequality",
        }
    }

    /// The walk sign the theorem speaks about, when it fixes one.
    pub fn implied_sign(self) -> Option<WalkSign> {
        match self {
            TheoremId::LlnPos
            | TheoremId::CltMarginalPos
            | TheoremId::FcltCovPos
            | TheoremId::CriticalMarginal => Some(WalkSign::Positive),
            TheoremId::LlnNeg | TheoremId::CltMarginalNeg | TheoremId::FcltCovNeg => {
                Some(WalkSign::Negative)
            }
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown check `{s}`")))
    }
}

fn default_grid() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}

/// Complete description of one verification run; a report is recomputable
/// from this alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub theorem: TheoremId,
    pub dist: StepKind,
    pub p: f64,
    /// Walk sign for sign-agnostic checks; sign-specific theorems override it.
    pub sign: WalkSign,
    pub truncation: Truncation,
    pub n: u64,
    pub replicas: u64,
    pub seed: u64,
    /// Test level; 0.01 and 0.05 are supported.
    pub level: f64,
    /// Time grid for covariance checks, fractions of n.
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    /// Extra absolute allowance for median-band LLN checks (infinite
    /// variance) and single-path checks.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl CheckSpec {
    pub fn new(
        theorem: TheoremId,
        dist: StepKind,
        p: f64,
        n: u64,
        replicas: u64,
        seed: u64,
    ) -> Self {
        Self {
            theorem,
            dist,
            p,
            sign: theorem.implied_sign().unwrap_or(WalkSign::Positive),
            truncation: match theorem {
                TheoremId::MartingaleConditions | TheoremId::MomentInequality => Truncation::Sqrt,
                _ => Truncation::None,
            },
            n,
            replicas,
            seed,
            level: 0.01,
            grid: default_grid(),
            tolerance: None,
        }
    }

    pub fn with_sign(mut self, sign: WalkSign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    /// The effective sign: theorem-implied when it has one.
    pub fn effective_sign(&self) -> WalkSign {
        self.theorem.implied_sign().unwrap_or(self.sign)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.replicas == 0 {
            return Err(Error::InvalidConfig(
                "n and replicas must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!(
                "p must lie in [0,1], got {}",
                self.p
            )));
        }
        if self.level != 0.01 && self.level != 0.05 {
            return Err(Error::InvalidConfig(format!(
                "supported levels are 0.01 and 0.05, got {}",
                self.level
            )));
        }
        if self.p == 1.0 {
            return Err(Error::InvalidConfig(
                "verification checks refuse the degenerate endpoint p = 1".into(),
            ));
        }
        if self.grid.is_empty()
            || !self.grid.windows(2).all(|w| w[0] < w[1])
            || self.grid[0] <= 0.0
            || *self.grid.last().unwrap() > 1.0
        {
            return Err(Error::InvalidConfig(
                "grid must be strictly increasing within (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Pass target: a point value with a tolerance handled by the check, or an
/// explicit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Value(f64),
    Interval { lo: f64, hi: f64 },
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub spec: CheckSpec,
    pub statistic: f64,
    pub target: Target,
    pub standard_error: f64,
    pub passed: bool,
    pub notes: String,
}

impl VerificationReport {
    pub fn one_line(&self) -> String {
        format!(
            "{:<22} {} statistic={:.6} target={} se={:.3e}",
            self.spec.theorem.name(),
            if self.passed { "PASS" } else { "FAIL" },
            self.statistic,
            match self.target {
                Target::Value(v) => format!("{v:.6}"),
                Target::Interval { lo, hi } => format!("[{lo:.4}, {hi:.4}]"),
            },
            self.standard_error,
        )
    }
}

/// Runs the check described by `spec`. `parallelism` never affects results.
pub fn run_check(spec: &CheckSpec, parallelism: Option<usize>) -> Result<VerificationReport> {
    spec.validate()?;
    match spec.theorem {
        TheoremId::LlnPos | TheoremId::LlnNeg => checks::check_lln(spec, parallelism),
        TheoremId::VarRegimes => checks::check_variance_regimes(spec, parallelism),
        TheoremId::CltMarginalPos | TheoremId::CltMarginalNeg => {
            checks::check_clt_marginal(spec, parallelism)
        }
        TheoremId::CriticalMarginal => checks::check_critical(spec, parallelism),
        TheoremId::FcltCovPos | TheoremId::FcltCovNeg => {
            checks::check_fclt_covariance(spec, parallelism)
        }
        TheoremId::LilBand => checks::check_lil_band(spec, parallelism),
        TheoremId::MartingaleConditions => checks::check_martingale_conditions(spec, parallelism),
        TheoremId::MomentInequality => checks::check_moment_inequality(spec, parallelism),
    }
}

/// A desk-scale default suite: every theorem at moderate size, fixed seeds.
/// Completes in about a minute on a few cores.
pub fn default_suite(seed: u64) -> Vec<CheckSpec> {
    use StepKind::*;
    let r = Rademacher;
    vec![
        CheckSpec::new(
            TheoremId::LlnPos,
            Constant { c: 1.0 },
            0.5,
            100_000,
            1,
            seed,
        )
        .with_tolerance(0.02),
        CheckSpec::new(
            TheoremId::LlnNeg,
            Constant { c: 1.0 },
            1.0 / 3.0,
            100_000,
            1,
            seed + 1,
        )
        .with_tolerance(0.02),
        CheckSpec::new(TheoremId::VarRegimes, r, 0.25, 50_000, 2_000, seed + 2),
        CheckSpec::new(TheoremId::VarRegimes, r, 0.5, 50_000, 2_000, seed + 3)
            .with_sign(WalkSign::Negative),
        CheckSpec::new(TheoremId::CltMarginalPos, r, 0.25, 50_000, 2_000, seed + 4),
        CheckSpec::new(TheoremId::CltMarginalNeg, r, 0.5, 50_000, 2_000, seed + 5),
        CheckSpec::new(TheoremId::FcltCovPos, r, 0.25, 50_000, 2_000, seed + 6),
        CheckSpec::new(TheoremId::FcltCovNeg, r, 0.5, 50_000, 2_000, seed + 7),
        CheckSpec::new(
            TheoremId::CriticalMarginal,
            r,
            0.5,
            100_000,
            2_000,
            seed + 12,
        ),
        CheckSpec::new(TheoremId::LilBand, r, 0.25, 1 << 17, 1_000, seed + 9),
        CheckSpec::new(
            TheoremId::MartingaleConditions,
            r,
            0.25,
            100_000,
            16,
            seed + 10,
        ),
        CheckSpec::new(
            TheoremId::MomentInequality,
            TwoPoint {
                a: 0.0,
                b: 3.0,
                prob_a: 0.5,
            },
            0.5,
            5,
            1_000,
            seed + 11,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_names_roundtrip() {
        for t in TheoremId::ALL {
            let back: TheoremId = t.name().parse().unwrap();
            assert_eq!(back, t);
        }
        assert!("no-such-check".parse::<TheoremId>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = CheckSpec::new(TheoremId::LlnPos, StepKind::Rademacher, 0.5, 100, 10, 1);
        assert!(spec.validate().is_ok());
        spec.level = 0.10;
        assert!(spec.validate().is_err());
        spec.level = 0.05;
        spec.p = 1.0;
        assert!(spec.validate().is_err());
        spec.p = 0.0;
        assert!(spec.validate().is_ok(), "p = 0 is the classical control");
    }
}
