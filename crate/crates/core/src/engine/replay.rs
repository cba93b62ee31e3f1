//! Deterministic reconstruction of a walk from its step records, used as a
//! cross-engine equality oracle.

use crate::config::WalkSign;
use crate::engine::walk::{PathResult, StepChoice, StepRecord};
use crate::error::{Error, Result};
use crate::stats::KahanSum;

/// Recomputes the walk from records alone. Records must cover indices
/// 1..=n contiguously, start with a fresh step, and every repeat index must
/// point strictly into the past; the first offending index is reported.
pub fn replay(records: &[StepRecord], sign: WalkSign) -> Result<PathResult> {
    if records.is_empty() {
        return Err(Error::MalformedRecord {
            index: 0,
            reason: "empty record list".into(),
        });
    }
    let mut values: Vec<f64> = Vec::with_capacity(records.len());
    let mut sum = KahanSum::default();
    let mut repeats = 0u64;
    for (i, rec) in records.iter().enumerate() {
        let expected = (i + 1) as u64;
        if rec.index != expected {
            return Err(Error::MalformedRecord {
                index: rec.index,
                reason: format!("expected contiguous index {expected}"),
            });
        }
        let value = match rec.choice {
            StepChoice::Fresh { x } => {
                if !x.is_finite() {
                    return Err(Error::MalformedRecord {
                        index: rec.index,
                        reason: "fresh value must be finite".into(),
                    });
                }
                x
            }
            StepChoice::Repeat { u } => {
                if u == 0 || u >= rec.index {
                    return Err(Error::MalformedRecord {
                        index: rec.index,
                        reason: format!("repeat index {u} not in 1..{}", rec.index),
                    });
                }
                repeats += 1;
                let past = values[(u - 1) as usize];
                match sign {
                    WalkSign::Positive => past,
                    WalkSign::Negative => -past,
                }
            }
        };
        values.push(value);
        sum.add(value);
    }
    let n = records.len() as u64;
    Ok(PathResult {
        walk_values: vec![(n, sum.value())],
        final_value: sum.value(),
        step_count: n,
        repeated_fraction: repeats as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Truncation, WalkConfig};
    use crate::dist::StepDistribution;
    use crate::engine::genealogy::simulate_with_genealogy;
    use crate::rng::RngStream;

    fn records_for(sign: WalkSign, seed: u64) -> (PathResult, Vec<StepRecord>) {
        let d = StepDistribution::gaussian(0.1, 1.0).unwrap();
        let cfg = WalkConfig::to_horizon(0.4, sign, Truncation::None, 500, seed).unwrap();
        let mut s = RngStream::new(seed, 1);
        let (path, _, records) = simulate_with_genealogy(&d, &cfg, &mut s).unwrap();
        (path, records)
    }

    #[test]
    fn replay_reproduces_simulation() {
        for sign in [WalkSign::Positive, WalkSign::Negative] {
            let (path, records) = records_for(sign, 21);
            let replayed = replay(&records, sign).unwrap();
            assert_eq!(replayed.final_value.to_bits(), path.final_value.to_bits());
            assert_eq!(replayed.repeated_fraction, path.repeated_fraction);
        }
    }

    #[test]
    fn negating_fresh_values_negates_the_walk() {
        for sign in [WalkSign::Positive, WalkSign::Negative] {
            let (path, records) = records_for(sign, 22);
            let negated: Vec<StepRecord> = records
                .iter()
                .map(|r| StepRecord {
                    index: r.index,
                    choice: match r.choice {
                        StepChoice::Fresh { x } => StepChoice::Fresh { x: -x },
                        other => other,
                    },
                })
                .collect();
            let replayed = replay(&negated, sign).unwrap();
            assert!(
                (replayed.final_value + path.final_value).abs()
                    < 1e-12 * path.final_value.abs().max(1.0)
            );
        }
    }

    #[test]
    fn coupled_walks_from_shared_draws() {
        // one record list realizes both walks on the same (eps, U, X) draws
        let (pos_path, records) = records_for(WalkSign::Positive, 23);
        let pos = replay(&records, WalkSign::Positive).unwrap();
        let neg = replay(&records, WalkSign::Negative).unwrap();
        assert_eq!(pos.final_value.to_bits(), pos_path.final_value.to_bits());
        assert_ne!(neg.final_value.to_bits(), pos.final_value.to_bits());
        assert_eq!(neg.repeated_fraction, pos.repeated_fraction);
    }

    #[test]
    fn malformed_records_report_first_offender() {
        let good = StepRecord {
            index: 1,
            choice: StepChoice::Fresh { x: 1.0 },
        };
        let bad_repeat = StepRecord {
            index: 2,
            choice: StepChoice::Repeat { u: 2 },
        };
        match replay(&[good, bad_repeat], WalkSign::Positive) {
            Err(Error::MalformedRecord { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected malformed-record error, got {other:?}"),
        }
        let gap = StepRecord {
            index: 3,
            choice: StepChoice::Fresh { x: 1.0 },
        };
        match replay(&[good, gap], WalkSign::Positive) {
            Err(Error::MalformedRecord { index, .. }) => assert_eq!(index, 3),
            other => panic!("expected malformed-record error, got {other:?}"),
        }
        assert!(replay(&[], WalkSign::Positive).is_err());
    }
}
