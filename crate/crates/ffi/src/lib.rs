//! C interface to `circrobust`.
//!
//! Every fallible function returns a [`CrStatus`]; outputs go through
//! pointer arguments. Objects are opaque handles released with their
//! matching `*_free`. The message of the most recent failure on the calling
//! thread is available from [`cr_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circrobust::detect::{self, CutoffRule, DetectionConfig, DetectionReport};
use circrobust::dispersion::{estimate_parameter, DispersionKind};
use circrobust::distributions::ModelKind;
use circrobust::{AngleSample, Error};

/// Status codes; the non-zero values match the command line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    Io = 1,
    InvalidInput = 2,
    Numeric = 3,
    NonUniqueMedian = 4,
    Explosion = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrModel {
    VonMises = 0,
    WrappedNormal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrDispersion {
    Cmad = 0,
    Clms = 1,
    Clts = 2,
    Csd = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrCutoffRule {
    UpperTail = 0,
    TwoSided = 1,
}

/// Breakdown flag of an estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrBreakdown {
    None = 0,
    Explosion = 1,
    Implosion = 2,
}

/// Result of [`cr_estimate`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CrEstimate {
    pub raw_dispersion: f64,
    pub mapped_csd: f64,
    /// κ̂ or σ̂; may be infinite on breakdown.
    pub parameter: f64,
    pub breakdown: CrBreakdown,
}

/// Opaque sample of canonical angles.
pub struct CrSample(AngleSample);

/// Opaque detection result.
pub struct CrDetection(DetectionReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CrStatus {
    match e.code() {
        1 => CrStatus::Io,
        2 => CrStatus::InvalidInput,
        4 => CrStatus::NonUniqueMedian,
        5 => CrStatus::Explosion,
        _ => CrStatus::Numeric,
    }
}

/// Runs `f`, recording errors and catching panics at the boundary.
fn guard(f: impl FnOnce() -> Result<(), CrStatus>) -> CrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CrStatus::Panic
        }
    }
}

fn fail(e: Error) -> CrStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null() -> CrStatus {
    set_error("null pointer argument".into());
    CrStatus::NullPointer
}

impl From<CrModel> for ModelKind {
    fn from(m: CrModel) -> Self {
        match m {
            CrModel::VonMises => ModelKind::VonMises,
            CrModel::WrappedNormal => ModelKind::WrappedNormal,
        }
    }
}

impl From<CrDispersion> for DispersionKind {
    fn from(k: CrDispersion) -> Self {
        match k {
            CrDispersion::Cmad => DispersionKind::Cmad,
            CrDispersion::Clms => DispersionKind::Clms,
            CrDispersion::Clts => DispersionKind::Clts,
            CrDispersion::Csd => DispersionKind::Csd,
        }
    }
}

impl From<CrCutoffRule> for CutoffRule {
    fn from(r: CrCutoffRule) -> Self {
        match r {
            CrCutoffRule::UpperTail => CutoffRule::UpperTail,
            CrCutoffRule::TwoSided => CutoffRule::TwoSided,
        }
    }
}

fn breakdown_of(b: Option<circrobust::dispersion::Breakdown>) -> CrBreakdown {
    use circrobust::dispersion::Breakdown;
    match b {
        None => CrBreakdown::None,
        Some(Breakdown::Explosion) => CrBreakdown::Explosion,
        Some(Breakdown::Implosion) => CrBreakdown::Implosion,
    }
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a sample from `len` angles in radians (or degrees when `degrees`
/// is true). The handle is written to `out` and must be released with
/// [`cr_sample_free`].
///
/// # Safety
/// `angles` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_sample_new(
    angles: *const f64,
    len: usize,
    degrees: bool,
    out: *mut *mut CrSample,
) -> CrStatus {
    guard(|| {
        if out.is_null() || (angles.is_null() && len > 0) {
            return Err(null());
        }
        let values = if len == 0 { &[][..] } else { std::slice::from_raw_parts(angles, len) };
        let sample = if degrees { AngleSample::from_degrees(values) } else { AngleSample::new(values.to_vec()) };
        let sample = sample.map_err(fail)?;
        *out = Box::into_raw(Box::new(CrSample(sample)));
        Ok(())
    })
}

/// # Safety
/// `sample` must come from [`cr_sample_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cr_sample_free(sample: *mut CrSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of angles in the sample (0 for NULL).
///
/// # Safety
/// `sample` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_sample_len(sample: *const CrSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.len())
}

/// Circular median of the sample.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_median(sample: *const CrSample, out: *mut f64) -> CrStatus {
    guard(|| {
        let (Some(s), false) = (sample.as_ref(), out.is_null()) else { return Err(null()) };
        *out = circrobust::circular::frechet_median(&s.0).map_err(fail)?;
        Ok(())
    })
}

/// Robust estimate of κ (von Mises) or σ (wrapped normal).
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_estimate(
    sample: *const CrSample,
    kind: CrDispersion,
    model: CrModel,
    out: *mut CrEstimate,
) -> CrStatus {
    guard(|| {
        let (Some(s), false) = (sample.as_ref(), out.is_null()) else { return Err(null()) };
        let r = estimate_parameter(&s.0, kind.into(), model.into()).map_err(fail)?;
        *out = CrEstimate {
            raw_dispersion: r.raw_dispersion,
            mapped_csd: r.mapped_csd,
            parameter: r.parameter,
            breakdown: breakdown_of(r.breakdown),
        };
        Ok(())
    })
}

/// Outlier cutoff on the arc distance for parameter `psi` and level `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_cutoff(
    model: CrModel,
    psi: f64,
    alpha: f64,
    rule: CrCutoffRule,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = detect::cutoff(model.into(), psi, alpha, rule.into()).map_err(fail)?;
        Ok(())
    })
}

/// Flags outlying angles. Release the result with [`cr_detection_free`].
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_detect(
    sample: *const CrSample,
    kind: CrDispersion,
    model: CrModel,
    alpha: f64,
    rule: CrCutoffRule,
    baseline: bool,
    out: *mut *mut CrDetection,
) -> CrStatus {
    guard(|| {
        let (Some(s), false) = (sample.as_ref(), out.is_null()) else { return Err(null()) };
        let cfg = DetectionConfig { model: model.into(), alpha, kind: kind.into(), baseline, rule: rule.into() };
        let report = detect::detect(&s.0, &cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(CrDetection(report)));
        Ok(())
    })
}

/// # Safety
/// `det` must come from [`cr_detect`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cr_detection_free(det: *mut CrDetection) {
    if !det.is_null() {
        drop(Box::from_raw(det));
    }
}

/// Centre used for detection (median, or mean in baseline mode).
///
/// # Safety
/// `det` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_detection_center(det: *const CrDetection) -> f64 {
    det.as_ref().map_or(f64::NAN, |d| d.0.median)
}

/// Estimated κ̂ or σ̂.
///
/// # Safety
/// `det` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_detection_parameter(det: *const CrDetection) -> f64 {
    det.as_ref().map_or(f64::NAN, |d| d.0.parameter)
}

/// Cutoff, or NaN when the scale estimate exploded.
///
/// # Safety
/// `det` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_detection_cutoff(det: *const CrDetection) -> f64 {
    det.as_ref().and_then(|d| d.0.cutoff).unwrap_or(f64::NAN)
}

/// Number of flagged points.
///
/// # Safety
/// `det` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_detection_flagged_count(det: *const CrDetection) -> usize {
    det.as_ref().map_or(0, |d| d.0.flagged_count)
}

/// Writes one 0/1 flag per input point into `flags` (capacity `cap`).
/// Fails with `InvalidInput` when `cap` is smaller than the sample.
///
/// # Safety
/// `det` must be a live handle; `flags` must point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cr_detection_flags(det: *const CrDetection, flags: *mut u8, cap: usize) -> CrStatus {
    guard(|| {
        let (Some(d), false) = (det.as_ref(), flags.is_null()) else { return Err(null()) };
        let pts = &d.0.points;
        if cap < pts.len() {
            return Err(fail(Error::InvalidArgument(format!("buffer holds {cap}, need {}", pts.len()))));
        }
        let dst = std::slice::from_raw_parts_mut(flags, pts.len());
        for (slot, p) in dst.iter_mut().zip(pts) {
            *slot = p.flagged as u8;
        }
        Ok(())
    })
}
