//! C ABI over `hrlab-core`.
//!
//! Every fallible function returns an [`HrlabStatus`] and writes its result
//! through an out-pointer. On failure a description is available from
//! [`hrlab_last_error`] on the same thread. Parameters and profiles are
//! opaque handles created by `*_new`-style functions and released with the
//! matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hrlab_core::constants::{hardy_rellich_constant, rellich_constant, ConstantResult};
use hrlab_core::engine::{rellich17_report, theorem23_report, EngineOptions, InequalityReport};
use hrlab_core::log_weights::{iter_exp, iter_log, LogWeightSpec};
use hrlab_core::params::{eigenvalue, multiplicity, Parameters, ValidatedParameters};
use hrlab_core::probe::rayleigh_quotient;
use hrlab_core::profile::{ModeExpansion, RadialProfile};
use hrlab_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EtaBelowThreshold = 3,
    DepthOverflow = 4,
    DomainError = 5,
    BadSupport = 6,
    ToleranceNotMet = 7,
    TailNotCertified = 8,
    ZeroDenominator = 9,
    Overflow = 10,
    Panic = 11,
}

impl From<&Error> for HrlabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::EtaBelowThreshold { .. } => HrlabStatus::EtaBelowThreshold,
            Error::DepthOverflow(_) => HrlabStatus::DepthOverflow,
            Error::DomainError(_) => HrlabStatus::DomainError,
            Error::BadSupport { .. } => HrlabStatus::BadSupport,
            Error::ToleranceNotMet { .. } => HrlabStatus::ToleranceNotMet,
            Error::TailNotCertified { .. } => HrlabStatus::TailNotCertified,
            Error::ZeroDenominator => HrlabStatus::ZeroDenominator,
            _ => HrlabStatus::InvalidArgument,
        }
    }
}

/// Validated `(n, gamma, N, R, eta)`.
pub struct HrlabParams(ValidatedParameters);

/// A radial test function.
pub struct HrlabProfile(RadialProfile);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HrlabConstant {
    pub value: f64,
    pub argmin_j: u32,
    pub scanned_up_to: u32,
    pub tail_certified: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HrlabJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HrlabReport {
    pub lhs: f64,
    pub rhs_constant: f64,
    pub rhs_log: f64,
    pub rhs_log_angular: f64,
    pub rhs_total: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub quad_err: f64,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HrlabStatus, msg: impl Into<String>) -> HrlabStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> HrlabStatus {
    let status = HrlabStatus::from(&e);
    fail(status, e.to_string())
}

/// Run `f`, turning a panic into [`HrlabStatus::Panic`].
fn guard(f: impl FnOnce() -> HrlabStatus) -> HrlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(HrlabStatus::Panic, "internal panic"),
    }
}

macro_rules! out_ref {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(r) => r,
            None => return fail(HrlabStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

macro_rules! in_ref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return fail(HrlabStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hrlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hrlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validate and allocate a parameter handle.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hrlab_params_new(
    n: u32,
    gamma: f64,
    big_n: u32,
    radius: f64,
    eta: f64,
    out: *mut *mut HrlabParams,
) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        match Parameters::new(n, gamma, big_n, radius, eta).validate() {
            Ok(p) => {
                *out = Box::into_raw(Box::new(HrlabParams(p)));
                HrlabStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from [`hrlab_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hrlab_params_free(p: *mut HrlabParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `lambda_j = j (j + n - 2)`.
#[no_mangle]
pub extern "C" fn hrlab_eigenvalue(n: u32, j: u32) -> f64 {
    eigenvalue(n, j)
}

/// Multiplicity of `lambda_j`; [`HrlabStatus::Overflow`] past `u64`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_multiplicity(n: u32, j: u32, out: *mut u64) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        if n < 2 {
            return from_error(Error::DimensionTooSmall(n));
        }
        match u64::try_from(multiplicity(n, j)) {
            Ok(m) => {
                *out = m;
                HrlabStatus::Ok
            }
            Err(_) => fail(HrlabStatus::Overflow, format!("multiplicity of degree {j} in dimension {n} exceeds u64")),
        }
    })
}

fn write_constant(r: ConstantResult, out: &mut HrlabConstant) -> HrlabStatus {
    *out = HrlabConstant {
        value: r.value,
        argmin_j: r.argmin_j,
        scanned_up_to: r.scanned_up_to,
        tail_certified: r.tail_certified,
    };
    match r.certified() {
        Ok(_) => HrlabStatus::Ok,
        Err(e) => from_error(e),
    }
}

/// `A_{n,gamma}`. An uncertified scan still fills `out` and returns
/// [`HrlabStatus::TailNotCertified`].
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_hardy_rellich_constant(n: u32, gamma: f64, out: *mut HrlabConstant) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        if n < 2 {
            return from_error(Error::DimensionTooSmall(n));
        }
        write_constant(hardy_rellich_constant(n, gamma), out)
    })
}

/// `C_{n,gamma}`, same conventions as [`hrlab_hardy_rellich_constant`].
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_rellich_constant(n: u32, gamma: f64, out: *mut HrlabConstant) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        if n < 2 {
            return from_error(Error::DimensionTooSmall(n));
        }
        write_constant(rellich_constant(n, gamma), out)
    })
}

fn write_f64(r: hrlab_core::Result<f64>, out: &mut f64) -> HrlabStatus {
    match r {
        Ok(v) => {
            *out = v;
            HrlabStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// `e_j`, with `e_0 = 0` and `e_{j+1} = exp(e_j)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_iter_exp(j: u32, out: *mut f64) -> HrlabStatus {
    guard(|| write_f64(iter_exp(j), out_ref!(out)))
}

/// `ln_k(x)`, the `k`-fold logarithm.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_iter_log(k: u32, x: f64, out: *mut f64) -> HrlabStatus {
    guard(|| write_f64(iter_log(k, x), out_ref!(out)))
}

/// `W_N(r) = sum_k prod_p ln_p(eta/r)^{-2}` on `0 < r < R`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_weight_sum(depth: u32, eta: f64, radius: f64, r: f64, out: *mut f64) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        write_f64(LogWeightSpec::new(depth, eta, radius).and_then(|s| s.weight_sum(r)), out)
    })
}

unsafe fn coefficients<'a>(coeffs: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if coeffs.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(coeffs, len))
    }
}

fn write_profile(r: hrlab_core::Result<RadialProfile>, out: &mut *mut HrlabProfile) -> HrlabStatus {
    match r {
        Ok(f) => {
            *out = Box::into_raw(Box::new(HrlabProfile(f)));
            HrlabStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// `(r-a)^p (b-r)^p q(r)` on `[a, b]`, `q` with `len` coefficients in
/// ascending order (`len = 0` means `q = 1`).
///
/// # Safety
/// `coeffs` must be valid for `len` reads; `out` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hrlab_profile_poly_bump(
    a: f64,
    b: f64,
    p: u32,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut HrlabProfile,
) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        let Some(c) = coefficients(coeffs, len) else {
            return fail(HrlabStatus::NullPointer, "coeffs is null");
        };
        write_profile(RadialProfile::poly_bump(a, b, p, c), out)
    })
}

/// `r^s u^p (1-u)^p q(u)` with `u = ln(r/a) / ln(b/a)`.
///
/// # Safety
/// As for [`hrlab_profile_poly_bump`].
#[no_mangle]
pub unsafe extern "C" fn hrlab_profile_log_bump(
    a: f64,
    b: f64,
    p: u32,
    exponent: f64,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut HrlabProfile,
) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        let Some(c) = coefficients(coeffs, len) else {
            return fail(HrlabStatus::NullPointer, "coeffs is null");
        };
        write_profile(RadialProfile::log_bump(a, b, p, exponent, c), out)
    })
}

/// Profile from its JSON record, as written by the CLI.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn hrlab_profile_from_json(json: *const c_char, out: *mut *mut HrlabProfile) -> HrlabStatus {
    guard(|| {
        let out = out_ref!(out);
        if json.is_null() {
            return fail(HrlabStatus::NullPointer, "json is null");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(HrlabStatus::InvalidArgument, "json is not UTF-8");
        };
        write_profile(RadialProfile::from_record_str(text), out)
    })
}

/// `F(r), F'(r), F''(r)`.
///
/// # Safety
/// `profile` must be a live handle or null; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn hrlab_profile_eval(profile: *const HrlabProfile, r: f64, out: *mut HrlabJet) -> HrlabStatus {
    guard(|| {
        let f = in_ref!(profile);
        let out = out_ref!(out);
        let j = f.0.eval(r);
        *out = HrlabJet { value: j.value, d1: j.d1, d2: j.d2 };
        HrlabStatus::Ok
    })
}

/// # Safety
/// `p` must be null or a live profile handle.
#[no_mangle]
pub unsafe extern "C" fn hrlab_profile_free(p: *mut HrlabProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn single(params: &HrlabParams, j: u32, profile: &HrlabProfile) -> hrlab_core::Result<ModeExpansion> {
    ModeExpansion::single(params.0, j, profile.0.clone())
}

fn write_report(r: hrlab_core::Result<InequalityReport>, out: &mut HrlabReport) -> HrlabStatus {
    match r {
        Ok(r) => {
            *out = HrlabReport {
                lhs: r.lhs,
                rhs_constant: r.rhs_constant,
                rhs_log: r.rhs_log,
                rhs_log_angular: r.rhs_log_angular,
                rhs_total: r.rhs_total,
                slack: r.slack,
                tolerance: r.tolerance,
                quad_err: r.quad_err,
                passed: r.passed,
            };
            HrlabStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

fn options(rel_tol: f64) -> EngineOptions {
    EngineOptions { rel_tol, ..EngineOptions::default() }
}

/// Hardy-Rellich inequality with log refinement for `F(r) phi_j`.
///
/// # Safety
/// Handles must be live or null; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn hrlab_theorem23_single(
    params: *const HrlabParams,
    j: u32,
    profile: *const HrlabProfile,
    rel_tol: f64,
    out: *mut HrlabReport,
) -> HrlabStatus {
    guard(|| {
        let (p, f, out) = (in_ref!(params), in_ref!(profile), out_ref!(out));
        write_report(single(p, j, f).and_then(|e| theorem23_report(&e, &options(rel_tol))), out)
    })
}

/// Rellich inequality with log refinement for `F(r) phi_j`.
///
/// # Safety
/// As for [`hrlab_theorem23_single`].
#[no_mangle]
pub unsafe extern "C" fn hrlab_rellich17_single(
    params: *const HrlabParams,
    j: u32,
    profile: *const HrlabProfile,
    rel_tol: f64,
    out: *mut HrlabReport,
) -> HrlabStatus {
    guard(|| {
        let (p, f, out) = (in_ref!(params), in_ref!(profile), out_ref!(out));
        write_report(single(p, j, f).and_then(|e| rellich17_report(&e, &options(rel_tol))), out)
    })
}

/// Hardy-Rellich Rayleigh quotient of `F(r) phi_j`.
///
/// # Safety
/// As for [`hrlab_theorem23_single`].
#[no_mangle]
pub unsafe extern "C" fn hrlab_rayleigh_quotient_single(
    params: *const HrlabParams,
    j: u32,
    profile: *const HrlabProfile,
    out: *mut f64,
) -> HrlabStatus {
    guard(|| {
        let (p, f, out) = (in_ref!(params), in_ref!(profile), out_ref!(out));
        write_f64(single(p, j, f).and_then(|e| rayleigh_quotient(&e)), out)
    })
}
