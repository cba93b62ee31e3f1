//! Walk configuration shared by the simulation and verification modules.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Positive reinforcement repeats a uniformly chosen past step; negative
/// reinforcement repeats it with flipped sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkSign {
    Positive,
    Negative,
}

/// Truncation rule t_n applied to fresh innovations: Z_n = X_n 1{|X_n| <= t_n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// t_n = infinity (no truncation).
    None,
    /// t_n = sqrt(n).
    Sqrt,
    /// t_n = n.
    Linear,
}

impl Truncation {
    /// The threshold t_n.
    #[inline]
    pub fn threshold(self, n: u64) -> f64 {
        match self {
            Truncation::None => f64::INFINITY,
            Truncation::Sqrt => (n as f64).sqrt(),
            Truncation::Linear => n as f64,
        }
    }
}

/// Full description of one walk simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Reinforcement parameter in [0, 1]; both endpoints are legal.
    pub p: f64,
    pub sign: WalkSign,
    pub truncation: Truncation,
    /// Number of steps n.
    pub horizon: u64,
    pub seed: u64,
    /// Indices at which the walk value is recorded; strictly increasing,
    /// nonempty, last <= horizon.
    pub checkpoints: Vec<u64>,
}

impl WalkConfig {
    pub fn new(
        p: f64,
        sign: WalkSign,
        truncation: Truncation,
        horizon: u64,
        seed: u64,
        checkpoints: Vec<u64>,
    ) -> Result<Self> {
        let cfg = Self {
            p,
            sign,
            truncation,
            horizon,
            seed,
            checkpoints,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Convenience constructor recording only the final value.
    pub fn to_horizon(
        p: f64,
        sign: WalkSign,
        truncation: Truncation,
        horizon: u64,
        seed: u64,
    ) -> Result<Self> {
        Self::new(p, sign, truncation, horizon, seed, vec![horizon])
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!(
                "reinforcement parameter must lie in [0,1], got {}",
                self.p
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::InvalidConfig("checkpoints must be nonempty".into()));
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        let first = *self.checkpoints.first().unwrap();
        let last = *self.checkpoints.last().unwrap();
        if first == 0 {
            return Err(Error::InvalidConfig("checkpoint indices start at 1".into()));
        }
        if last > self.horizon {
            return Err(Error::InvalidConfig(format!(
                "last checkpoint {last} exceeds horizon {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(WalkConfig::to_horizon(0.5, WalkSign::Positive, Truncation::None, 10, 1).is_ok());
        assert!(WalkConfig::to_horizon(1.5, WalkSign::Positive, Truncation::None, 10, 1).is_err());
        assert!(WalkConfig::to_horizon(0.5, WalkSign::Positive, Truncation::None, 0, 1).is_err());
        // endpoints are legal
        assert!(WalkConfig::to_horizon(0.0, WalkSign::Negative, Truncation::None, 10, 1).is_ok());
        assert!(WalkConfig::to_horizon(1.0, WalkSign::Negative, Truncation::None, 10, 1).is_ok());

        let bad = WalkConfig::new(0.5, WalkSign::Positive, Truncation::None, 10, 1, vec![3, 3]);
        assert!(bad.is_err());
        let bad = WalkConfig::new(0.5, WalkSign::Positive, Truncation::None, 10, 1, vec![11]);
        assert!(bad.is_err());
        let bad = WalkConfig::new(0.5, WalkSign::Positive, Truncation::None, 10, 1, vec![]);
        assert!(bad.is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(Truncation::None.threshold(5), f64::INFINITY);
        assert_eq!(Truncation::Sqrt.threshold(9), 3.0);
        assert_eq!(Truncation::Linear.threshold(9), 9.0);
    }
}
