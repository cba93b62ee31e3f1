//! Genealogical forest of the reinforcement dynamics.
//!
//! Every fresh step founds a tree; a repeat of step u attaches the new index
//! below u in u's tree, with depth parity flipped. N_j(n) is the size of the
//! tree rooted at j, Delta_j(n) its even-minus-odd vertex count, and the walk
//! values decompose as sum_j N_j Z_j (positive) and sum_j Delta_j Z_j
//! (negative).

use crate::config::{WalkConfig, WalkSign};
use crate::dist::StepDistribution;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::KahanSum;

use super::walk::{simulate_observed, PathResult, StepChoice, StepObserver, StepRecord};

/// One genealogical tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenealogyTree {
    /// Birth index of the founding fresh step.
    pub root: u64,
    /// Vertex indices, strictly increasing from the root.
    pub vertices: Vec<u64>,
    pub even_count: u64,
    pub odd_count: u64,
}

impl GenealogyTree {
    /// N_j(n).
    pub fn occupancy(&self) -> u64 {
        self.even_count + self.odd_count
    }

    /// Delta_j(n).
    pub fn delta(&self) -> i64 {
        self.even_count as i64 - self.odd_count as i64
    }
}

/// The full forest of one realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenealogyForest {
    trees: Vec<GenealogyTree>,
    horizon: u64,
}

impl GenealogyForest {
    /// Trees ordered by root index.
    pub fn trees(&self) -> &[GenealogyTree] {
        &self.trees
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Reconstructs the walk value from the occupancy representation using
    /// the fresh innovations stored in `records`. An independent route to
    /// the same number as the step-by-step sum.
    pub fn reconstruct_sum(&self, records: &[StepRecord], sign: WalkSign) -> Result<f64> {
        let mut acc = KahanSum::default();
        for tree in &self.trees {
            let rec =
                records
                    .get((tree.root - 1) as usize)
                    .ok_or_else(|| Error::MalformedRecord {
                        index: tree.root,
                        reason: "missing record for tree root".into(),
                    })?;
            let StepChoice::Fresh { x } = rec.choice else {
                return Err(Error::MalformedRecord {
                    index: tree.root,
                    reason: "tree root must be a fresh step".into(),
                });
            };
            let coeff = match sign {
                WalkSign::Positive => tree.occupancy() as f64,
                WalkSign::Negative => tree.delta() as f64,
            };
            acc.add(coeff * x);
        }
        Ok(acc.value())
    }
}

struct ForestBuilder {
    /// tree slot per step index (0-based), parity per step index
    tree_of: Vec<u32>,
    parity_of: Vec<u8>,
    trees: Vec<GenealogyTree>,
}

impl StepObserver for ForestBuilder {
    #[inline]
    fn on_step(&mut self, index: u64, choice: StepChoice) {
        match choice {
            StepChoice::Fresh { .. } => {
                let slot = self.trees.len() as u32;
                self.trees.push(GenealogyTree {
                    root: index,
                    vertices: vec![index],
                    even_count: 1,
                    odd_count: 0,
                });
                self.tree_of.push(slot);
                self.parity_of.push(0);
            }
            StepChoice::Repeat { u } => {
                let slot = self.tree_of[(u - 1) as usize];
                let parity = 1 - self.parity_of[(u - 1) as usize];
                let tree = &mut self.trees[slot as usize];
                tree.vertices.push(index);
                if parity == 0 {
                    tree.even_count += 1;
                } else {
                    tree.odd_count += 1;
                }
                self.tree_of.push(slot);
                self.parity_of.push(parity);
            }
        }
    }
}

/// Simulates the walk while building its genealogical forest and the full
/// step record list. Memory is O(horizon).
pub fn simulate_with_genealogy(
    dist: &StepDistribution,
    cfg: &WalkConfig,
    stream: &mut RngStream,
) -> Result<(PathResult, GenealogyForest, Vec<StepRecord>)> {
    struct Both {
        forest: ForestBuilder,
        records: Vec<StepRecord>,
    }
    impl StepObserver for Both {
        #[inline]
        fn on_step(&mut self, index: u64, choice: StepChoice) {
            self.forest.on_step(index, choice);
            self.records.on_step(index, choice);
        }
    }
    let n = cfg.horizon as usize;
    let mut obs = Both {
        forest: ForestBuilder {
            tree_of: Vec::with_capacity(n),
            parity_of: Vec::with_capacity(n),
            trees: Vec::new(),
        },
        records: Vec::with_capacity(n),
    };
    let path = simulate_observed(dist, cfg, stream, &mut obs)?;
    let forest = GenealogyForest {
        trees: obs.forest.trees,
        horizon: cfg.horizon,
    };
    Ok((path, forest, obs.records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Truncation;

    fn run(
        p: f64,
        sign: WalkSign,
        horizon: u64,
        seed: u64,
    ) -> (PathResult, GenealogyForest, Vec<StepRecord>) {
        let d = StepDistribution::rademacher();
        let cfg = WalkConfig::to_horizon(p, sign, Truncation::None, horizon, seed).unwrap();
        let mut s = RngStream::new(seed, 1);
        simulate_with_genealogy(&d, &cfg, &mut s).unwrap()
    }

    #[test]
    fn forest_partitions_steps() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            let (_, forest, _) = run(p, WalkSign::Positive, 500, 17);
            let total: u64 = forest.trees().iter().map(|t| t.occupancy()).sum();
            assert_eq!(total, 500);
            for t in forest.trees() {
                assert!(t.occupancy() >= 1);
                assert!(t.delta().unsigned_abs() <= t.occupancy());
                assert_eq!(
                    (t.delta().rem_euclid(2)) as u64,
                    t.occupancy() % 2,
                    "parity of Delta and N must match"
                );
                assert!(t.vertices.windows(2).all(|w| w[0] < w[1]));
                assert_eq!(t.vertices[0], t.root);
            }
        }
    }

    #[test]
    fn degenerate_forests() {
        let (_, forest, _) = run(0.0, WalkSign::Positive, 64, 3);
        assert_eq!(forest.trees().len(), 64);
        assert!(forest
            .trees()
            .iter()
            .all(|t| t.occupancy() == 1 && t.delta() == 1));

        let (_, forest, _) = run(1.0, WalkSign::Positive, 64, 3);
        assert_eq!(forest.trees().len(), 1);
        assert_eq!(forest.trees()[0].occupancy(), 64);
        assert_eq!(forest.trees()[0].root, 1);
    }

    #[test]
    fn occupancy_representation_positive() {
        for seed in 0..20 {
            let (path, forest, records) = run(0.5, WalkSign::Positive, 300, seed);
            let rebuilt = forest
                .reconstruct_sum(&records, WalkSign::Positive)
                .unwrap();
            assert_eq!(
                rebuilt, path.final_value,
                "integer arithmetic must agree exactly"
            );
        }
    }

    #[test]
    fn signed_representation_negative() {
        for seed in 0..20 {
            let (path, forest, records) = run(0.5, WalkSign::Negative, 300, seed);
            let rebuilt = forest
                .reconstruct_sum(&records, WalkSign::Negative)
                .unwrap();
            assert_eq!(rebuilt, path.final_value);
        }
    }

    #[test]
    fn float_steps_agree_to_ulp_scale() {
        let d = StepDistribution::gaussian(0.2, 1.0).unwrap();
        let cfg =
            WalkConfig::to_horizon(0.4, WalkSign::Negative, Truncation::Sqrt, 2000, 8).unwrap();
        let mut s = RngStream::new(8, 1);
        let (path, forest, records) = simulate_with_genealogy(&d, &cfg, &mut s).unwrap();
        let rebuilt = forest
            .reconstruct_sum(&records, WalkSign::Negative)
            .unwrap();
        let scale = path.final_value.abs().max(
            records
                .iter()
                .map(|r| match r.choice {
                    StepChoice::Fresh { x } => x.abs(),
                    _ => 0.0,
                })
                .fold(0.0, f64::max),
        );
        assert!((rebuilt - path.final_value).abs() <= 1e-10 * scale.max(1.0));
    }
}
