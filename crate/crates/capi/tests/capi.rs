//! Exercises the C ABI and cross-checks it against the core library.

use reinforced_walks::config::{Truncation, WalkConfig, WalkSign};
use reinforced_walks::dist::StepDistribution;
use reinforced_walks::engine::simulate;
use reinforced_walks::rng::RngStream;
use reinforced_walks_capi::*;

#[test]
fn version_is_nonempty() {
    let v = unsafe { std::ffi::CStr::from_ptr(rw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn distribution_lifecycle_and_moments() {
    unsafe {
        let d = rw_distribution_gaussian(0.5, 2.0);
        assert!(!d.is_null());
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        assert_eq!(rw_distribution_mean(d, &mut m1), RwStatus::RwOk);
        assert_eq!(rw_distribution_second_moment(d, &mut m2), RwStatus::RwOk);
        assert_eq!(m1, 0.5);
        assert_eq!(m2, 4.25);
        rw_distribution_free(d);

        let p = rw_distribution_pareto(1.5, 1.0);
        let mut pm2 = 0.0;
        assert_eq!(rw_distribution_second_moment(p, &mut pm2), RwStatus::RwOk);
        assert!(pm2.is_infinite());
        rw_distribution_free(p);

        // invalid parameters: NULL handle plus an error message
        let bad = rw_distribution_gaussian(0.0, -1.0);
        assert!(bad.is_null());
        let len = rw_last_error_message(std::ptr::null_mut(), 0);
        assert!(len > 0);

        rw_distribution_free(std::ptr::null_mut()); // no-op
    }
}

#[test]
fn simulate_final_matches_core() {
    unsafe {
        let d = rw_distribution_rademacher();
        let mut out = f64::NAN;
        let status = rw_simulate_final(
            d,
            0.5,
            RwSign::RwSignNegative,
            RwTruncation::RwTruncationNone,
            10_000,
            42,
            1,
            &mut out,
        );
        assert_eq!(status, RwStatus::RwOk);
        rw_distribution_free(d);

        let dist = StepDistribution::rademacher();
        let cfg =
            WalkConfig::to_horizon(0.5, WalkSign::Negative, Truncation::None, 10_000, 42).unwrap();
        let mut stream = RngStream::new(42, 1);
        let path = simulate(&dist, &cfg, &mut stream).unwrap();
        assert_eq!(out.to_bits(), path.final_value.to_bits());
    }
}

#[test]
fn checkpoints_and_degenerate_walk() {
    unsafe {
        let d = rw_distribution_constant(1.0);
        let checkpoints = [1u64, 5, 10];
        let mut values = [0.0f64; 3];
        let status = rw_simulate_checkpoints(
            d,
            1.0,
            RwSign::RwSignPositive,
            RwTruncation::RwTruncationNone,
            10,
            7,
            1,
            checkpoints.as_ptr(),
            checkpoints.len(),
            values.as_mut_ptr(),
        );
        assert_eq!(status, RwStatus::RwOk);
        assert_eq!(values, [1.0, 5.0, 10.0]);
        rw_distribution_free(d);
    }
}

#[test]
fn moment_profile_matches_core() {
    unsafe {
        let d = rw_distribution_rademacher();
        let n = 100u64;
        let mut means = vec![0.0f64; n as usize];
        let mut vars = vec![0.0f64; n as usize];
        let status = rw_moment_profile(
            d,
            0.5,
            RwSign::RwSignNegative,
            RwTruncation::RwTruncationNone,
            n,
            means.as_mut_ptr(),
            vars.as_mut_ptr(),
        );
        assert_eq!(status, RwStatus::RwOk);
        rw_distribution_free(d);
        // negative p = 1/2 Rademacher: Var(n) = n/2 exactly for n >= 2
        assert!((vars[99] - 50.0).abs() < 1e-9);
        assert!(means.iter().all(|m| m.abs() < 1e-12));

        // infinite second moment without truncation is refused
        let p = rw_distribution_pareto(1.5, 1.0);
        let status = rw_moment_profile(
            p,
            0.5,
            RwSign::RwSignPositive,
            RwTruncation::RwTruncationNone,
            10,
            std::ptr::null_mut(),
            vars.as_mut_ptr(),
        );
        assert_eq!(status, RwStatus::RwErrUnsupported);
        rw_distribution_free(p);
    }
}

#[test]
fn occupancy_formulas() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(rw_expected_occupancy(0.5, 2, 3, &mut out), RwStatus::RwOk);
        assert!((out - 0.625).abs() < 1e-14);
        assert_eq!(rw_expected_delta(0.5, 2, 3, &mut out), RwStatus::RwOk);
        assert!((out - 0.375).abs() < 1e-14);
        assert_eq!(
            rw_expected_delta_squared(0.5, 2, 2, &mut out),
            RwStatus::RwOk
        );
        assert!((out - 0.5).abs() < 1e-14);
        assert_eq!(
            rw_expected_occupancy(0.5, 4, 3, &mut out),
            RwStatus::RwErrInvalidArgument
        );
    }
}

#[test]
fn gamma_ratio_and_covariance() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(rw_gamma_ratio(0.3, 2, &mut out), RwStatus::RwOk);
        assert!((out - 1.0 / 1.3).abs() < 1e-14);
        assert_eq!(
            rw_gamma_ratio(-1.5, 2, &mut out),
            RwStatus::RwErrInvalidArgument
        );

        assert_eq!(
            rw_limit_covariance(
                RwProcess::RwProcessNoiseReinforced,
                0.25,
                1.0,
                1.0,
                &mut out
            ),
            RwStatus::RwOk
        );
        assert!((out - 2.0).abs() < 1e-14);
        assert_eq!(
            rw_limit_covariance(RwProcess::RwProcessCounterbalanced, 0.5, 0.5, 1.0, &mut out),
            RwStatus::RwOk
        );
        assert!((out - 0.5f64.powf(1.5) / 2.0).abs() < 1e-14);
        assert_eq!(
            rw_limit_covariance(
                RwProcess::RwProcessNoiseReinforced,
                0.75,
                0.5,
                1.0,
                &mut out
            ),
            RwStatus::RwErrInvalidArgument
        );
    }
}

#[test]
fn lil_constants() {
    unsafe {
        let d = rw_distribution_rademacher();
        let mut out = 0.0;
        assert_eq!(
            rw_lil_constant(RwSign::RwSignPositive, 0.25, d, &mut out),
            RwStatus::RwOk
        );
        assert!((out - 2.0f64.sqrt()).abs() < 1e-14);
        assert_eq!(
            rw_lil_constant(RwSign::RwSignNegative, 0.5, d, &mut out),
            RwStatus::RwOk
        );
        assert!((out - 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(
            rw_lil_constant(RwSign::RwSignPositive, 0.75, d, &mut out),
            RwStatus::RwErrInvalidArgument
        );
        rw_distribution_free(d);
    }
}

#[test]
fn header_lists_every_export() {
    let header = include_str!("../include/reinforced_walks.h");
    for symbol in [
        "rw_version",
        "rw_last_error_message",
        "rw_distribution_rademacher",
        "rw_distribution_gaussian",
        "rw_distribution_two_point",
        "rw_distribution_constant",
        "rw_distribution_pareto",
        "rw_distribution_free",
        "rw_distribution_mean",
        "rw_distribution_second_moment",
        "rw_simulate_final",
        "rw_simulate_checkpoints",
        "rw_moment_profile",
        "rw_expected_occupancy",
        "rw_expected_delta",
        "rw_expected_delta_squared",
        "rw_gamma_ratio",
        "rw_limit_covariance",
        "rw_lil_constant",
        "RW_OK",
        "RW_SIGN_NEGATIVE",
        "RW_TRUNCATION_SQRT",
        "RW_PROCESS_COUNTERBALANCED",
    ] {
        assert!(header.contains(symbol), "header is missing `{symbol}`");
    }
}
