//! Parallel replica driver with schedule-independent results.
//!
//! Replica r runs single-threaded on stream (seed, r); outputs are collected
//! in replica order and reduced in that fixed order, so results are
//! bit-identical for a fixed seed whatever the thread count.

use crate::config::WalkConfig;
use crate::dist::StepDistribution;
use crate::engine::walk::simulate;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats;
use rayon::prelude::*;
use serde::Serialize;

/// Runs `f` once per replica id 1..=replicas, each on its own stream, and
/// returns the outputs in replica order regardless of scheduling.
pub fn parallel_replicas<T, F>(
    seed: u64,
    replicas: u64,
    parallelism: Option<usize>,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> T + Sync,
{
    parallel_replicas_offset(seed, 0, replicas, parallelism, f)
}

/// As [`parallel_replicas`], but replica r runs on stream offset + r. Lets a
/// check run several replica families on one seed without stream reuse.
pub fn parallel_replicas_offset<T, F>(
    seed: u64,
    offset: u64,
    replicas: u64,
    parallelism: Option<usize>,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> T + Sync,
{
    if replicas == 0 {
        return Err(Error::InvalidConfig("replicas must be >= 1".into()));
    }
    let run = || {
        (1..=replicas)
            .into_par_iter()
            .map(|r| {
                let mut stream = RngStream::new(seed, offset + r);
                f(r, &mut stream)
            })
            .collect::<Vec<T>>()
    };
    match parallelism {
        None => Ok(run()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

/// Per-checkpoint summary over replicas.
#[derive(Debug, Clone, Serialize)]
pub struct CheckpointSummary {
    pub index: u64,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

/// Monte Carlo output: per-checkpoint replica values plus summaries.
#[derive(Debug, Clone)]
pub struct MonteCarloResult {
    checkpoints: Vec<u64>,
    /// values[c][r] = walk value at checkpoint c for replica r
    values: Vec<Vec<f64>>,
}

impl MonteCarloResult {
    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    pub fn replicas(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Replica values at the c-th checkpoint.
    pub fn values_at(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    /// Replica values at the final checkpoint.
    pub fn final_values(&self) -> &[f64] {
        self.values.last().expect("checkpoints are nonempty")
    }

    pub fn summary(&self) -> Vec<CheckpointSummary> {
        self.checkpoints
            .iter()
            .zip(&self.values)
            .map(|(&index, vals)| CheckpointSummary {
                index,
                mean: stats::mean(vals),
                variance: stats::sample_variance(vals),
                min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
            .collect()
    }
}

/// Simulates independent replicas of the configured walk on streams
/// (cfg.seed, 1..=replicas) and gathers checkpoint values.
pub fn monte_carlo(
    dist: &StepDistribution,
    cfg: &WalkConfig,
    replicas: u64,
    parallelism: Option<usize>,
) -> Result<MonteCarloResult> {
    cfg.validate()?;
    let rows = parallel_replicas(cfg.seed, replicas, parallelism, |_, stream| {
        let path = simulate(dist, cfg, stream).expect("config validated above");
        path.walk_values
            .iter()
            .map(|&(_, v)| v)
            .collect::<Vec<f64>>()
    })?;
    let mut values = vec![Vec::with_capacity(replicas as usize); cfg.checkpoints.len()];
    for row in rows {
        for (c, v) in row.into_iter().enumerate() {
            values[c].push(v);
        }
    }
    Ok(MonteCarloResult {
        checkpoints: cfg.checkpoints.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Truncation, WalkSign};

    #[test]
    fn single_replica_equals_single_path() {
        let d = StepDistribution::rademacher();
        let cfg =
            WalkConfig::to_horizon(0.5, WalkSign::Positive, Truncation::None, 1000, 31).unwrap();
        let mc = monte_carlo(&d, &cfg, 1, None).unwrap();
        let mut s = RngStream::new(31, 1);
        let path = simulate(&d, &cfg, &mut s).unwrap();
        assert_eq!(mc.final_values(), &[path.final_value]);
        let summary = mc.summary();
        assert_eq!(summary[0].mean, path.final_value);
    }

    #[test]
    fn results_independent_of_parallelism() {
        let d = StepDistribution::gaussian(0.0, 1.0).unwrap();
        let cfg = WalkConfig::new(
            0.25,
            WalkSign::Negative,
            Truncation::None,
            2000,
            7,
            vec![500, 2000],
        )
        .unwrap();
        let a = monte_carlo(&d, &cfg, 64, Some(1)).unwrap();
        let b = monte_carlo(&d, &cfg, 64, Some(4)).unwrap();
        let c = monte_carlo(&d, &cfg, 64, None).unwrap();
        for ci in 0..2 {
            let bits = |xs: &[f64]| xs.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a.values_at(ci)), bits(b.values_at(ci)));
            assert_eq!(bits(a.values_at(ci)), bits(c.values_at(ci)));
        }
    }

    #[test]
    fn diffusive_variance_scale() {
        let d = StepDistribution::rademacher();
        let n = 10_000u64;
        let cfg =
            WalkConfig::to_horizon(0.25, WalkSign::Positive, Truncation::None, n, 13).unwrap();
        let mc = monte_carlo(&d, &cfg, 2000, None).unwrap();
        let normalized: Vec<f64> = mc
            .final_values()
            .iter()
            .map(|v| v / (n as f64).sqrt())
            .collect();
        let var = stats::sample_variance(&normalized);
        let se = stats::variance_standard_error(&normalized);
        // target 1/(1-2p) = 2 up to the finite-n correction; generous 5 SE
        assert!((var - 2.0).abs() < 5.0 * se + 0.02, "var {var}, se {se}");
    }

    #[test]
    fn zero_replicas_rejected() {
        let d = StepDistribution::rademacher();
        let cfg = WalkConfig::to_horizon(0.5, WalkSign::Positive, Truncation::None, 10, 1).unwrap();
        assert!(monte_carlo(&d, &cfg, 0, None).is_err());
    }
}
