//! C ABI over the duality laboratory.
//!
//! Closed-form quantities are plain functions writing through out-pointers
//! and returning a [`DualityStatus`] code. Monte Carlo runs live behind the
//! opaque [`DualityExperiment`] handle: create, run, read estimates, free.
//! All functions are thread-safe as long as a handle is not shared across
//! threads without synchronization; distinct handles are independent.
//!
//! The matching C header is generated into `include/duality.h` at build
//! time.

use duality_core::discrimination::{
    dm_closed_form, helstrom, strategy_mutual_information, uqsd_bound, Strategy,
};
use duality_core::interferometer::{visibility_closed_form, ExperimentConfig};
use duality_core::montecarlo::{
    estimate_report, sample_counts, CountingMode, EstimateReport, NoiseModel,
};
use std::os::raw::c_char;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualityStatus {
    /// Success.
    Ok = 0,
    /// A parameter was outside its documented domain.
    InvalidArgument = 1,
    /// A required pointer was null.
    NullPointer = 2,
    /// The computation failed internally.
    ComputeError = 3,
    /// The handle has not been run yet.
    NotRun = 4,
}

/// Which-way measurement strategy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualityStrategy {
    Uqsd = 0,
    Med = 1,
}

impl From<DualityStrategy> for Strategy {
    fn from(s: DualityStrategy) -> Self {
        match s {
            DualityStrategy::Uqsd => Strategy::Uqsd,
            DualityStrategy::Med => Strategy::Med,
        }
    }
}

fn angles_from(tan2a: f64, sin2n: f64) -> Option<(f64, f64, f64, f64)> {
    if !(0.0..=1.0).contains(&tan2a) || !(0.0..=1.0).contains(&sin2n) {
        return None;
    }
    let theta_a = tan2a.atan() / 2.0;
    let theta_n = sin2n.asin() / 2.0;
    let p1 = 1.0 / (1.0 + tan2a * tan2a);
    Some((theta_a, theta_n, p1, 1.0 - p1))
}

unsafe fn write_out(ptr: *mut f64, value: f64) -> DualityStatus {
    if ptr.is_null() {
        return DualityStatus::NullPointer;
    }
    *ptr = value;
    DualityStatus::Ok
}

/// Path priors p1 = cos²2θ_a and p2 = sin²2θ_a from the symmetry
/// parameter tan2θ_a ∈ [0, 1].
///
/// # Safety
/// `p1` and `p2` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn duality_split_probs(
    tan2a: f64,
    p1: *mut f64,
    p2: *mut f64,
) -> DualityStatus {
    let Some((_, _, v1, v2)) = angles_from(tan2a, 0.0) else {
        return DualityStatus::InvalidArgument;
    };
    if p1.is_null() || p2.is_null() {
        return DualityStatus::NullPointer;
    }
    *p1 = v1;
    *p2 = v2;
    DualityStatus::Ok
}

/// Ideal fringe visibility V = 2√(p1·p2)·sin2θ_n.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn duality_visibility(
    tan2a: f64,
    sin2n: f64,
    out: *mut f64,
) -> DualityStatus {
    let Some((theta_a, theta_n, _, _)) = angles_from(tan2a, sin2n) else {
        return DualityStatus::InvalidArgument;
    };
    match visibility_closed_form(theta_a, theta_n) {
        Ok(v) => write_out(out, v),
        Err(_) => DualityStatus::ComputeError,
    }
}

/// Optimal unambiguous-discrimination success probability D_u.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn duality_uqsd_bound(
    tan2a: f64,
    sin2n: f64,
    out: *mut f64,
) -> DualityStatus {
    let Some((_, theta_n, p1, p2)) = angles_from(tan2a, sin2n) else {
        return DualityStatus::InvalidArgument;
    };
    match uqsd_bound(p1, p2, theta_n) {
        Ok(v) => write_out(out, v),
        Err(_) => DualityStatus::ComputeError,
    }
}

/// Helstrom bound: maximum correct-guess probability P_r.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn duality_helstrom(
    tan2a: f64,
    sin2n: f64,
    out: *mut f64,
) -> DualityStatus {
    let Some((_, theta_n, p1, p2)) = angles_from(tan2a, sin2n) else {
        return DualityStatus::InvalidArgument;
    };
    match helstrom(p1, p2, theta_n) {
        Ok(v) => write_out(out, v),
        Err(_) => DualityStatus::ComputeError,
    }
}

/// Minimum-error distinguishability D_m = 2·P_r − 1.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn duality_dm(tan2a: f64, sin2n: f64, out: *mut f64) -> DualityStatus {
    let Some((_, theta_n, p1, p2)) = angles_from(tan2a, sin2n) else {
        return DualityStatus::InvalidArgument;
    };
    match dm_closed_form(p1, p2, theta_n) {
        Ok(v) => write_out(out, v),
        Err(_) => DualityStatus::ComputeError,
    }
}

/// Exact mutual information (bits) gained by the strategy's optimal
/// measurement.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn duality_mutual_information(
    tan2a: f64,
    sin2n: f64,
    strategy: DualityStrategy,
    out: *mut f64,
) -> DualityStatus {
    let Some((theta_a, theta_n, _, _)) = angles_from(tan2a, sin2n) else {
        return DualityStatus::InvalidArgument;
    };
    match strategy_mutual_information(strategy.into(), theta_a, theta_n) {
        Ok(v) => write_out(out, v),
        Err(_) => DualityStatus::ComputeError,
    }
}

/// Opaque Monte Carlo experiment: one configuration, one strategy, a photon
/// budget and a master seed.
pub struct DualityExperiment {
    config: ExperimentConfig,
    strategy: Strategy,
    noise: NoiseModel,
    seed: u64,
    report: Option<EstimateReport>,
}

/// Create an experiment handle. Returns null when a parameter is outside
/// its domain. Free with [`duality_experiment_free`].
#[no_mangle]
pub extern "C" fn duality_experiment_new(
    tan2a: f64,
    sin2n: f64,
    strategy: DualityStrategy,
    photons: f64,
    phases: usize,
    repeats: usize,
    loop_visibility: f64,
    seed: u64,
) -> *mut DualityExperiment {
    if !photons.is_finite() || photons <= 0.0 || phases < 2 || repeats == 0 {
        return std::ptr::null_mut();
    }
    let Ok(config) = ExperimentConfig::from_ratios(tan2a, sin2n, 0.0, loop_visibility) else {
        return std::ptr::null_mut();
    };
    let noise = NoiseModel {
        mean_rate: photons,
        duration: 1.0,
        repeats,
        loop_visibility,
        n_phases: phases,
        mode: CountingMode::Sampled,
        ..NoiseModel::default()
    };
    Box::into_raw(Box::new(DualityExperiment {
        config,
        strategy: strategy.into(),
        noise,
        seed,
        report: None,
    }))
}

/// Sample counts and compute the estimators. Deterministic for a given
/// handle configuration and seed.
///
/// # Safety
/// `handle` must come from [`duality_experiment_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn duality_experiment_run(handle: *mut DualityExperiment) -> DualityStatus {
    let Some(exp) = handle.as_mut() else {
        return DualityStatus::NullPointer;
    };
    match sample_counts(&exp.config, exp.strategy, &exp.noise, exp.seed)
        .and_then(|record| estimate_report(&record))
    {
        Ok(report) => {
            exp.report = Some(report);
            DualityStatus::Ok
        }
        Err(_) => DualityStatus::ComputeError,
    }
}

unsafe fn read_estimate(
    handle: *const DualityExperiment,
    value: *mut f64,
    sigma: *mut f64,
    pick: impl Fn(&EstimateReport) -> duality_core::montecarlo::Estimate,
) -> DualityStatus {
    let Some(exp) = handle.as_ref() else {
        return DualityStatus::NullPointer;
    };
    let Some(report) = &exp.report else {
        return DualityStatus::NotRun;
    };
    if value.is_null() || sigma.is_null() {
        return DualityStatus::NullPointer;
    }
    let est = pick(report);
    *value = est.value;
    *sigma = est.sigma;
    DualityStatus::Ok
}

/// Estimated fringe visibility with its one-standard-deviation error.
///
/// # Safety
/// `handle` must be a live experiment; `value`/`sigma` writable.
#[no_mangle]
pub unsafe extern "C" fn duality_experiment_visibility(
    handle: *const DualityExperiment,
    value: *mut f64,
    sigma: *mut f64,
) -> DualityStatus {
    read_estimate(handle, value, sigma, |r| r.visibility)
}

/// Estimated distinguishability (D_u under UQSD, D_m under MED).
///
/// # Safety
/// `handle` must be a live experiment; `value`/`sigma` writable.
#[no_mangle]
pub unsafe extern "C" fn duality_experiment_distinguishability(
    handle: *const DualityExperiment,
    value: *mut f64,
    sigma: *mut f64,
) -> DualityStatus {
    read_estimate(handle, value, sigma, |r| r.distinguishability)
}

/// Estimated duality sum: V + D_u under UQSD, V² + D_m² under MED.
///
/// # Safety
/// `handle` must be a live experiment; `value`/`sigma` writable.
#[no_mangle]
pub unsafe extern "C" fn duality_experiment_duality_sum(
    handle: *const DualityExperiment,
    value: *mut f64,
    sigma: *mut f64,
) -> DualityStatus {
    read_estimate(handle, value, sigma, |r| r.duality_sum)
}

/// Release a handle. Null is accepted and ignored.
///
/// # Safety
/// `handle` must come from [`duality_experiment_new`] and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn duality_experiment_free(handle: *mut DualityExperiment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn duality_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
