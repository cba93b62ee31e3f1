//! Property-based invariants of the simulation engines.

use proptest::prelude::*;
use reinforced_walks::config::{Truncation, WalkConfig, WalkSign};
use reinforced_walks::dist::{StepDistribution, StepKind};
use reinforced_walks::engine::{read_trace, replay, simulate_with_genealogy, write_trace};
use reinforced_walks::limits::{covariance, GaussianKind};
use reinforced_walks::rng::RngStream;

fn any_sign() -> impl Strategy<Value = WalkSign> {
    prop_oneof![Just(WalkSign::Positive), Just(WalkSign::Negative)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forest_partitions_and_parity(
        p in 0.0f64..=1.0,
        seed in 0u64..1000,
        n in 1u64..300,
        sign in any_sign(),
    ) {
        let dist = StepDistribution::rademacher();
        let cfg = WalkConfig::to_horizon(p, sign, Truncation::None, n, seed).unwrap();
        let mut stream = RngStream::new(seed, 1);
        let (path, forest, records) = simulate_with_genealogy(&dist, &cfg, &mut stream).unwrap();

        let total: u64 = forest.trees().iter().map(|t| t.occupancy()).sum();
        prop_assert_eq!(total, n);
        for tree in forest.trees() {
            prop_assert!(tree.occupancy() >= 1);
            prop_assert!(tree.delta().unsigned_abs() <= tree.occupancy());
            prop_assert_eq!(tree.delta().rem_euclid(2) as u64, tree.occupancy() % 2);
            prop_assert!(tree.vertices.windows(2).all(|w| w[0] < w[1]));
        }

        // occupancy representation reproduces the walk exactly for +-1 steps
        let rebuilt = forest.reconstruct_sum(&records, sign).unwrap();
        prop_assert_eq!(rebuilt.to_bits(), path.final_value.to_bits());
    }

    #[test]
    fn replay_matches_simulation(
        p in 0.0f64..=1.0,
        seed in 0u64..1000,
        n in 1u64..200,
        sign in any_sign(),
    ) {
        let dist = StepDistribution::gaussian(0.1, 1.3).unwrap();
        let cfg = WalkConfig::to_horizon(p, sign, Truncation::Sqrt, n, seed).unwrap();
        let mut stream = RngStream::new(seed, 2);
        let (path, _, records) = simulate_with_genealogy(&dist, &cfg, &mut stream).unwrap();
        let replayed = replay(&records, sign).unwrap();
        prop_assert_eq!(replayed.final_value.to_bits(), path.final_value.to_bits());
    }

    #[test]
    fn trace_roundtrip(
        p in 0.0f64..=1.0,
        seed in 0u64..1000,
        n in 1u64..200,
    ) {
        let dist = StepDistribution::gaussian(0.0, 1.0).unwrap();
        let cfg = WalkConfig::to_horizon(p, WalkSign::Negative, Truncation::None, n, seed).unwrap();
        let mut stream = RngStream::new(seed, 3);
        let (_, _, records) = simulate_with_genealogy(&dist, &cfg, &mut stream).unwrap();
        let mut buf = Vec::new();
        write_trace(&records, &mut buf).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn covariance_properties(
        p_nr in 0.0f64..0.5,
        p_cb in 0.0f64..1.0,
        s in 0.0f64..3.0,
        t in 0.0f64..3.0,
    ) {
        for kind in [
            GaussianKind::StandardBm,
            GaussianKind::NoiseReinforcedBm { p: p_nr },
            GaussianKind::CounterbalancedBm { p: p_cb },
        ] {
            let a = covariance(kind, s, t).unwrap();
            let b = covariance(kind, t, s).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
            prop_assert!(covariance(kind, 0.0, t).unwrap() == 0.0);
            // nondecreasing in the first argument
            if s <= t {
                let half = covariance(kind, s * 0.5, t).unwrap();
                prop_assert!(half <= a + 1e-12);
            }
        }
    }

    #[test]
    fn dist_spec_roundtrip(kind in prop_oneof![
        Just(StepKind::Rademacher),
        (0.01f64..10.0).prop_map(|sd| StepKind::Gaussian { mean: -1.5, sd }),
        (0.0f64..=1.0).prop_map(|prob_a| StepKind::TwoPoint { a: -0.5, b: 2.0, prob_a }),
        (-5.0f64..5.0).prop_map(|c| StepKind::Constant { c }),
        (1.01f64..8.0).prop_map(|alpha| StepKind::Pareto { alpha, scale: 0.5 }),
    ]) {
        let text = kind.to_string();
        let back: StepKind = text.parse().unwrap();
        prop_assert_eq!(kind, back);
    }
}
