//! C ABI for the reinforced-walks library.
//!
//! Conventions: opaque handles for owned objects, integer status codes for
//! fallible calls, and a thread-local last-error message retrievable with
//! [`rw_last_error_message`]. Output parameters are written only on
//! `RW_OK`. The committed header lives in `include/reinforced_walks.h`
//! (regenerable with cbindgen; see `cbindgen.toml`).

use reinforced_walks::config::{Truncation, WalkConfig, WalkSign};
use reinforced_walks::dist::StepDistribution;
use reinforced_walks::engine::simulate;
use reinforced_walks::error::Error;
use reinforced_walks::limits::{covariance, lil_envelope, GaussianKind, LilRegime};
use reinforced_walks::moments::{
    expected_delta, expected_delta2, expected_occupancy, gamma_ratio, mean_profile,
    variance_profile,
};
use reinforced_walks::rng::RngStream;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwStatus {
    RwOk = 0,
    RwErrInvalidArgument = 1,
    RwErrNullPointer = 2,
    RwErrUnsupported = 3,
    RwErrInternal = 4,
}

/// Walk sign selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwSign {
    RwSignPositive = 0,
    RwSignNegative = 1,
}

/// Truncation rule selector (t_n = infinity, sqrt(n), n).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwTruncation {
    RwTruncationNone = 0,
    RwTruncationSqrt = 1,
    RwTruncationLinear = 2,
}

/// Limit-process selector for covariance queries.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwProcess {
    RwProcessStandardBm = 0,
    RwProcessNoiseReinforced = 1,
    RwProcessCounterbalanced = 2,
}

/// Opaque handle to a step distribution.
pub struct RwDistribution {
    inner: StepDistribution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> RwStatus {
    match err {
        Error::InvalidDistribution(_) | Error::InvalidConfig(_) | Error::MalformedRecord { .. } => {
            RwStatus::RwErrInvalidArgument
        }
        Error::SecondMomentRequired(_) | Error::Unsupported(_) => RwStatus::RwErrUnsupported,
        Error::Trace(_) | Error::Io(_) => RwStatus::RwErrInternal,
    }
}

fn guarded(f: impl FnOnce() -> RwStatus + std::panic::UnwindSafe) -> RwStatus {
    match catch_unwind(f) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            RwStatus::RwErrInternal
        }
    }
}

fn sign_of(sign: RwSign) -> WalkSign {
    match sign {
        RwSign::RwSignPositive => WalkSign::Positive,
        RwSign::RwSignNegative => WalkSign::Negative,
    }
}

fn truncation_of(truncation: RwTruncation) -> Truncation {
    match truncation {
        RwTruncation::RwTruncationNone => Truncation::None,
        RwTruncation::RwTruncationSqrt => Truncation::Sqrt,
        RwTruncation::RwTruncationLinear => Truncation::Linear,
    }
}

/// Version string of the library; the pointer is static.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `cap` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be NULL (then only the
/// length is returned).
#[no_mangle]
pub unsafe extern "C" fn rw_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // always NUL-terminate
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

fn new_distribution(result: Result<StepDistribution, Error>) -> *mut RwDistribution {
    match result {
        Ok(inner) => Box::into_raw(Box::new(RwDistribution { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Rademacher steps (+1 or -1 with probability 1/2 each). Never fails.
#[no_mangle]
pub extern "C" fn rw_distribution_rademacher() -> *mut RwDistribution {
    new_distribution(Ok(StepDistribution::rademacher()))
}

/// Gaussian steps; NULL on invalid parameters (see rw_last_error_message).
#[no_mangle]
pub extern "C" fn rw_distribution_gaussian(mean: f64, sd: f64) -> *mut RwDistribution {
    new_distribution(StepDistribution::gaussian(mean, sd))
}

/// Two-point law taking value `a` with probability `prob_a`, else `b`.
#[no_mangle]
pub extern "C" fn rw_distribution_two_point(a: f64, b: f64, prob_a: f64) -> *mut RwDistribution {
    new_distribution(StepDistribution::two_point(a, b, prob_a))
}

/// Degenerate law at `c`.
#[no_mangle]
pub extern "C" fn rw_distribution_constant(c: f64) -> *mut RwDistribution {
    new_distribution(Ok(StepDistribution::constant(c)))
}

/// Pareto law with survival (scale/x)^alpha, x >= scale; requires alpha > 1.
#[no_mangle]
pub extern "C" fn rw_distribution_pareto(alpha: f64, scale: f64) -> *mut RwDistribution {
    new_distribution(StepDistribution::pareto(alpha, scale))
}

/// Releases a distribution handle; NULL is a no-op.
///
/// # Safety
/// `dist` must be a pointer returned by a constructor, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rw_distribution_free(dist: *mut RwDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

unsafe fn dist_ref<'a>(dist: *const RwDistribution) -> Option<&'a StepDistribution> {
    dist.as_ref().map(|d| &d.inner)
}

/// E(X) of the step law.
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_distribution_mean(
    dist: *const RwDistribution,
    out: *mut f64,
) -> RwStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    };
    *out = d.m1();
    RwStatus::RwOk
}

/// E(X^2) of the step law; +infinity when the second moment diverges.
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_distribution_second_moment(
    dist: *const RwDistribution,
    out: *mut f64,
) -> RwStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    };
    *out = d.m2().finite().unwrap_or(f64::INFINITY);
    RwStatus::RwOk
}

/// Simulates one walk on stream (seed, stream_id) and writes the final
/// value.
///
/// # Safety
/// `dist` must be a live handle; `out_final` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_simulate_final(
    dist: *const RwDistribution,
    p: f64,
    sign: RwSign,
    truncation: RwTruncation,
    horizon: u64,
    seed: u64,
    stream_id: u64,
    out_final: *mut f64,
) -> RwStatus {
    let (Some(d), false) = (dist_ref(dist), out_final.is_null()) else {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    };
    guarded(AssertUnwindSafe(|| {
        let cfg = match WalkConfig::to_horizon(
            p,
            sign_of(sign),
            truncation_of(truncation),
            horizon,
            seed,
        ) {
            Ok(cfg) => cfg,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let mut stream = RngStream::new(seed, stream_id);
        match simulate(d, &cfg, &mut stream) {
            Ok(path) => {
                *out_final = path.final_value;
                RwStatus::RwOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    }))
}

/// Simulates one walk and writes its value at each checkpoint (strictly
/// increasing indices, the last one at most `horizon`).
///
/// # Safety
/// `dist` must be a live handle; `checkpoints` and `out_values` must point
/// to `n_checkpoints` elements.
#[no_mangle]
pub unsafe extern "C" fn rw_simulate_checkpoints(
    dist: *const RwDistribution,
    p: f64,
    sign: RwSign,
    truncation: RwTruncation,
    horizon: u64,
    seed: u64,
    stream_id: u64,
    checkpoints: *const u64,
    n_checkpoints: usize,
    out_values: *mut f64,
) -> RwStatus {
    let (Some(d), false, false) = (dist_ref(dist), checkpoints.is_null(), out_values.is_null())
    else {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    };
    let cps = std::slice::from_raw_parts(checkpoints, n_checkpoints).to_vec();
    let out = std::slice::from_raw_parts_mut(out_values, n_checkpoints);
    guarded(AssertUnwindSafe(|| {
        let cfg = match WalkConfig::new(
            p,
            sign_of(sign),
            truncation_of(truncation),
            horizon,
            seed,
            cps,
        ) {
            Ok(cfg) => cfg,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let mut stream = RngStream::new(seed, stream_id);
        match simulate(d, &cfg, &mut stream) {
            Ok(path) => {
                for (slot, (_, v)) in out.iter_mut().zip(&path.walk_values) {
                    *slot = *v;
                }
                RwStatus::RwOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    }))
}

/// Writes the exact-recursion E S*(n) and/or Var S*(n) for n = 1..=n_max
/// into caller arrays of length n_max; either array pointer may be NULL to
/// skip it.
///
/// # Safety
/// `dist` must be a live handle; non-NULL output pointers must have
/// `n_max` elements.
#[no_mangle]
pub unsafe extern "C" fn rw_moment_profile(
    dist: *const RwDistribution,
    p: f64,
    sign: RwSign,
    truncation: RwTruncation,
    n_max: u64,
    out_mean: *mut f64,
    out_var: *mut f64,
) -> RwStatus {
    let Some(d) = dist_ref(dist) else {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    };
    if n_max == 0 {
        set_error("n_max must be positive");
        return RwStatus::RwErrInvalidArgument;
    }
    guarded(AssertUnwindSafe(|| {
        if !out_mean.is_null() {
            let means = mean_profile(d, p, sign_of(sign), truncation_of(truncation), n_max);
            std::ptr::copy_nonoverlapping(means.as_ptr(), out_mean, n_max as usize);
        }
        if !out_var.is_null() {
            match variance_profile(d, p, sign_of(sign), truncation_of(truncation), n_max) {
                Ok(vars) => {
                    std::ptr::copy_nonoverlapping(vars.as_ptr(), out_var, n_max as usize);
                }
                Err(e) => {
                    set_error(&e.to_string());
                    return status_of(&e);
                }
            }
        }
        RwStatus::RwOk
    }))
}

unsafe fn write_result(out: *mut f64, result: Result<f64, Error>) -> RwStatus {
    if out.is_null() {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    }
    match result {
        Ok(v) => {
            *out = v;
            RwStatus::RwOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// E N_j(n), the expected occupancy of the tree rooted at step j.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_expected_occupancy(p: f64, j: u64, n: u64, out: *mut f64) -> RwStatus {
    write_result(out, expected_occupancy(p, j, n))
}

/// E Delta_j(n), the expected signed occupancy.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_expected_delta(p: f64, j: u64, n: u64, out: *mut f64) -> RwStatus {
    write_result(out, expected_delta(p, j, n))
}

/// E Delta_j(n)^2 by the exact recursion.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_expected_delta_squared(
    p: f64,
    j: u64,
    n: u64,
    out: *mut f64,
) -> RwStatus {
    write_result(out, expected_delta2(p, j, n))
}

/// The gamma-ratio scaling a_n = Gamma(n) Gamma(1+x) / Gamma(n+x).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_gamma_ratio(x: f64, n: u64, out: *mut f64) -> RwStatus {
    write_result(out, gamma_ratio(x, n))
}

/// Closed-form covariance of the limiting Gaussian process at times (s, t).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_limit_covariance(
    process: RwProcess,
    p: f64,
    s: f64,
    t: f64,
    out: *mut f64,
) -> RwStatus {
    let kind = match process {
        RwProcess::RwProcessStandardBm => GaussianKind::StandardBm,
        RwProcess::RwProcessNoiseReinforced => GaussianKind::NoiseReinforcedBm { p },
        RwProcess::RwProcessCounterbalanced => GaussianKind::CounterbalancedBm { p },
    };
    write_result(out, covariance(kind, s, t))
}

/// The law-of-iterated-logarithm constant for the given walk: the positive
/// walk uses the diffusive constant for p < 1/2 and the critical one at
/// p = 1/2; the negative walk is defined for p in [0, 1).
///
/// # Safety
/// `dist` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_lil_constant(
    sign: RwSign,
    p: f64,
    dist: *const RwDistribution,
    out: *mut f64,
) -> RwStatus {
    let Some(d) = dist_ref(dist) else {
        set_error("null pointer");
        return RwStatus::RwErrNullPointer;
    };
    let regime = match (sign_of(sign), p) {
        (WalkSign::Positive, p) if p == 0.5 => LilRegime::PositiveCritical,
        (WalkSign::Positive, _) => LilRegime::PositiveDiffusive,
        (WalkSign::Negative, _) => LilRegime::Negative,
    };
    write_result(out, lil_envelope(regime, p, d).map(|e| e.constant))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_message_roundtrip() {
        let ptr = rw_distribution_pareto(0.5, 1.0);
        assert!(ptr.is_null());
        let mut buf = [0 as c_char; 256];
        let len = unsafe { rw_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert!(len > 0);
        let msg = unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) };
        assert!(msg.to_str().unwrap().contains("alpha"));
    }
}
