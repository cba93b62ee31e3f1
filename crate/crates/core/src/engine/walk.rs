//! Direct simulation of the reinforced walks.
//!
//! Step 1 is always a fresh draw. For n >= 2 the walk repeats a uniformly
//! chosen past step with probability p (negating it for the counterbalanced
//! walk) and draws a fresh innovation otherwise. Truncation censors fresh
//! innovations at birth; repeats copy the already-censored value. The draw
//! order per step is frozen: one Bernoulli(p) draw, then either the repeat
//! index or the fresh step, never both.
//!
//! The positive walk addresses arbitrary history, so all past step values
//! are retained: memory is O(horizon).

use crate::config::{WalkConfig, WalkSign};
use crate::dist::StepDistribution;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::KahanSum;
use serde::{Deserialize, Serialize};

/// What happened at one step of the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepChoice {
    /// Fresh innovation; `x` is the value after truncation.
    Fresh { x: f64 },
    /// Repeat (possibly negated) of the step at index `u`.
    Repeat { u: u64 },
}

/// One step record, sufficient to replay the whole realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: u64,
    pub choice: StepChoice,
}

impl StepRecord {
    pub fn epsilon(&self) -> u8 {
        match self.choice {
            StepChoice::Fresh { .. } => 0,
            StepChoice::Repeat { .. } => 1,
        }
    }
}

/// Trajectory checkpoints of one realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    /// (index, walk value) at each configured checkpoint.
    pub walk_values: Vec<(u64, f64)>,
    /// Walk value at the horizon.
    pub final_value: f64,
    pub step_count: u64,
    /// Fraction of the n steps that were repeats (step 1 is never one).
    pub repeated_fraction: f64,
}

pub(crate) trait StepObserver {
    fn on_step(&mut self, index: u64, choice: StepChoice);
}

pub(crate) struct NoObserver;

impl StepObserver for NoObserver {
    #[inline]
    fn on_step(&mut self, _: u64, _: StepChoice) {}
}

impl StepObserver for Vec<StepRecord> {
    #[inline]
    fn on_step(&mut self, index: u64, choice: StepChoice) {
        self.push(StepRecord { index, choice });
    }
}

#[inline]
fn truncate(x: f64, threshold: f64) -> f64 {
    if x.abs() <= threshold {
        x
    } else {
        0.0
    }
}

pub(crate) fn simulate_observed<O: StepObserver>(
    dist: &StepDistribution,
    cfg: &WalkConfig,
    stream: &mut RngStream,
    observer: &mut O,
) -> Result<PathResult> {
    cfg.validate()?;
    let n = cfg.horizon;
    let negate = cfg.sign == WalkSign::Negative;
    let mut values: Vec<f64> = Vec::with_capacity(n as usize);
    let mut sum = KahanSum::default();
    let mut walk_values = Vec::with_capacity(cfg.checkpoints.len());
    let mut next_cp = 0usize;
    let mut repeats = 0u64;

    let z1 = truncate(dist.sample(stream), cfg.truncation.threshold(1));
    values.push(z1);
    sum.add(z1);
    observer.on_step(1, StepChoice::Fresh { x: z1 });
    if cfg.checkpoints[next_cp] == 1 {
        walk_values.push((1, sum.value()));
        next_cp += 1;
    }

    for k in 2..=n {
        let value = if stream.bernoulli(cfg.p) {
            let u = stream.uniform_past_index(k);
            repeats += 1;
            observer.on_step(k, StepChoice::Repeat { u });
            let past = values[(u - 1) as usize];
            if negate {
                -past
            } else {
                past
            }
        } else {
            let z = truncate(dist.sample(stream), cfg.truncation.threshold(k));
            observer.on_step(k, StepChoice::Fresh { x: z });
            z
        };
        values.push(value);
        sum.add(value);
        if next_cp < cfg.checkpoints.len() && cfg.checkpoints[next_cp] == k {
            walk_values.push((k, sum.value()));
            next_cp += 1;
        }
    }

    Ok(PathResult {
        walk_values,
        final_value: sum.value(),
        step_count: n,
        repeated_fraction: repeats as f64 / n as f64,
    })
}

/// Simulates the positively step-reinforced walk.
pub fn simulate_positive(
    dist: &StepDistribution,
    cfg: &WalkConfig,
    stream: &mut RngStream,
) -> Result<PathResult> {
    if cfg.sign != WalkSign::Positive {
        return Err(Error::InvalidConfig(
            "simulate_positive requires a positive-sign config".into(),
        ));
    }
    simulate_observed(dist, cfg, stream, &mut NoObserver)
}

/// Simulates the negatively step-reinforced (counterbalanced) walk.
pub fn simulate_negative(
    dist: &StepDistribution,
    cfg: &WalkConfig,
    stream: &mut RngStream,
) -> Result<PathResult> {
    if cfg.sign != WalkSign::Negative {
        return Err(Error::InvalidConfig(
            "simulate_negative requires a negative-sign config".into(),
        ));
    }
    simulate_observed(dist, cfg, stream, &mut NoObserver)
}

/// Sign-dispatching entry point.
pub fn simulate(
    dist: &StepDistribution,
    cfg: &WalkConfig,
    stream: &mut RngStream,
) -> Result<PathResult> {
    simulate_observed(dist, cfg, stream, &mut NoObserver)
}
