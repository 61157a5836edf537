//! C ABI over the `ld3` crate.
//!
//! Every object is an opaque handle created by a `*_new` function and
//! released with the matching `*_free`. Functions return an [`Ld3Status`];
//! results are written through out-pointers. Panics never cross the
//! boundary: they are caught and reported as `LD3_STATUS_PANIC`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ld3::baselines::{Ddm, Eddm, ErrorSignal, Phase};
use ld3::rankfusion::{ws_coefficient, FusionMethod, GlobalRanking};
use ld3::{ClassifierChain, LabelVector, Ld3, Ld3Config};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ld3Status {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or had the wrong length.
    InvalidArgument = 2,
    /// A Rust panic was caught; the handle should be freed.
    Panic = 3,
}

/// Rank fusion used by the detector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ld3Fusion {
    Reciprocal = 0,
    Borda = 1,
    Condorcet = 2,
    Mc4 = 3,
}

fn fusion_from(code: u32) -> Option<FusionMethod> {
    Some(match code {
        c if c == Ld3Fusion::Reciprocal as u32 => FusionMethod::Reciprocal,
        c if c == Ld3Fusion::Borda as u32 => FusionMethod::Borda,
        c if c == Ld3Fusion::Condorcet as u32 => FusionMethod::Condorcet,
        c if c == Ld3Fusion::Mc4 as u32 => FusionMethod::Mc4,
        _ => return None,
    })
}

/// Phase reported by the error-rate detectors.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ld3Phase {
    Stable = 0,
    Warning = 1,
    Drift = 2,
}

impl From<Phase> for Ld3Phase {
    fn from(p: Phase) -> Self {
        match p {
            Phase::Stable => Ld3Phase::Stable,
            Phase::Warning => Ld3Phase::Warning,
            Phase::Drift => Ld3Phase::Drift,
        }
    }
}

/// Detector hyperparameters.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct Ld3Params {
    pub window: usize,
    pub sigma: f64,
    pub max_anomalies: usize,
    /// One of the `Ld3Fusion` values.
    pub fusion: u32,
}

/// Outcome of one detector update.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct Ld3Update {
    pub drift: bool,
    /// False until both label windows are full; `correlation` is then NaN.
    pub has_correlation: bool,
    pub correlation: f64,
}

/// Opaque label-dependency drift detector.
pub struct Ld3Detector(Ld3);

/// Opaque classifier chain.
pub struct Ld3Chain(ClassifierChain);

/// Opaque DDM detector.
pub struct Ld3Ddm(Ddm);

/// Opaque EDDM detector.
pub struct Ld3Eddm(Eddm);

fn guard(f: impl FnOnce() -> Ld3Status) -> Ld3Status {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(Ld3Status::Panic)
}

/// Views `len` elements at `data`; an empty slice may come with a null pointer.
unsafe fn view<'a, T>(data: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if data.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(data, len))
    }
}

unsafe fn labels_from(data: *const u8, len: usize) -> Result<LabelVector, Ld3Status> {
    let bits = view(data, len).ok_or(Ld3Status::NullPointer)?;
    LabelVector::new(bits.to_vec()).map_err(|_| Ld3Status::InvalidArgument)
}

unsafe fn boxed<T>(value: T, out: *mut *mut T) -> Ld3Status {
    *out = Box::into_raw(Box::new(value));
    Ld3Status::Ok
}

unsafe fn release<T>(handle: *mut T) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn ld3_status_message(status: i32) -> *const c_char {
    let msg: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"invalid argument",
        3 => c"internal panic",
        _ => c"unknown status",
    };
    msg.as_ptr()
}

/// Default hyperparameters (window 500, sigma 4, no tolerated anomalies, reciprocal fusion).
#[no_mangle]
pub extern "C" fn ld3_params_default() -> Ld3Params {
    let c = Ld3Config::default();
    Ld3Params {
        window: c.window,
        sigma: c.sigma,
        max_anomalies: c.max_anomalies,
        fusion: Ld3Fusion::Reciprocal as u32,
    }
}

/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ld3_detector_new(
    params: Ld3Params,
    labels: usize,
    out: *mut *mut Ld3Detector,
) -> Ld3Status {
    guard(|| {
        if out.is_null() {
            return Ld3Status::NullPointer;
        }
        let Some(fusion) = fusion_from(params.fusion) else {
            return Ld3Status::InvalidArgument;
        };
        let config = Ld3Config {
            window: params.window,
            sigma: params.sigma,
            max_anomalies: params.max_anomalies,
            fusion,
        };
        match Ld3::new(config, labels) {
            Ok(d) => boxed(Ld3Detector(d), out),
            Err(_) => Ld3Status::InvalidArgument,
        }
    })
}

/// Feeds one predicted label vector of `len` bytes, each 0 or 1.
///
/// # Safety
/// `detector` must come from [`ld3_detector_new`]; `labels` must point to
/// `len` bytes; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ld3_detector_update(
    detector: *mut Ld3Detector,
    labels: *const u8,
    len: usize,
    out: *mut Ld3Update,
) -> Ld3Status {
    guard(|| {
        let (Some(d), false) = (detector.as_mut(), out.is_null()) else {
            return Ld3Status::NullPointer;
        };
        let labels = match labels_from(labels, len) {
            Ok(l) => l,
            Err(s) => return s,
        };
        match d.0.update(&labels) {
            Ok(signal) => {
                *out = Ld3Update {
                    drift: signal.drift,
                    has_correlation: signal.correlation.is_some(),
                    correlation: signal.correlation.unwrap_or(f64::NAN),
                };
                Ld3Status::Ok
            }
            Err(_) => Ld3Status::InvalidArgument,
        }
    })
}

/// Clears all windows.
///
/// # Safety
/// `detector` must come from [`ld3_detector_new`].
#[no_mangle]
pub unsafe extern "C" fn ld3_detector_reset(detector: *mut Ld3Detector) -> Ld3Status {
    guard(|| match detector.as_mut() {
        Some(d) => {
            d.0.reset();
            Ld3Status::Ok
        }
        None => Ld3Status::NullPointer,
    })
}

/// # Safety
/// `detector` must come from [`ld3_detector_new`] or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ld3_detector_free(detector: *mut Ld3Detector) {
    release(detector);
}

/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ld3_chain_new(
    features: usize,
    labels: usize,
    out: *mut *mut Ld3Chain,
) -> Ld3Status {
    guard(|| {
        if out.is_null() {
            return Ld3Status::NullPointer;
        }
        boxed(Ld3Chain(ClassifierChain::new(features, labels)), out)
    })
}

/// Predicts a label vector into `out_labels` (`labels_len` bytes).
///
/// # Safety
/// `chain` must come from [`ld3_chain_new`]; `x` must point to `x_len`
/// doubles and `out_labels` to `labels_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ld3_chain_predict(
    chain: *const Ld3Chain,
    x: *const f64,
    x_len: usize,
    out_labels: *mut u8,
    labels_len: usize,
) -> Ld3Status {
    guard(|| {
        let Some(c) = chain.as_ref() else {
            return Ld3Status::NullPointer;
        };
        let Some(x) = view(x, x_len) else {
            return Ld3Status::NullPointer;
        };
        if labels_len != c.0.label_count() {
            return Ld3Status::InvalidArgument;
        }
        if out_labels.is_null() && labels_len > 0 {
            return Ld3Status::NullPointer;
        }
        match c.0.predict(x) {
            Ok(p) => {
                if labels_len > 0 {
                    ptr::copy_nonoverlapping(p.bits().as_ptr(), out_labels, labels_len);
                }
                Ld3Status::Ok
            }
            Err(_) => Ld3Status::InvalidArgument,
        }
    })
}

/// Trains on one instance.
///
/// # Safety
/// `chain` must come from [`ld3_chain_new`]; `x` must point to `x_len`
/// doubles and `labels` to `labels_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ld3_chain_partial_fit(
    chain: *mut Ld3Chain,
    x: *const f64,
    x_len: usize,
    labels: *const u8,
    labels_len: usize,
) -> Ld3Status {
    guard(|| {
        let Some(c) = chain.as_mut() else {
            return Ld3Status::NullPointer;
        };
        let Some(x) = view(x, x_len) else {
            return Ld3Status::NullPointer;
        };
        let y = match labels_from(labels, labels_len) {
            Ok(y) => y,
            Err(s) => return s,
        };
        match c.0.partial_fit(x, &y) {
            Ok(()) => Ld3Status::Ok,
            Err(_) => Ld3Status::InvalidArgument,
        }
    })
}

/// Forgets all training.
///
/// # Safety
/// `chain` must come from [`ld3_chain_new`].
#[no_mangle]
pub unsafe extern "C" fn ld3_chain_reset(chain: *mut Ld3Chain) -> Ld3Status {
    guard(|| match chain.as_mut() {
        Some(c) => {
            c.0.reset();
            Ld3Status::Ok
        }
        None => Ld3Status::NullPointer,
    })
}

/// # Safety
/// `chain` must come from [`ld3_chain_new`] or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ld3_chain_free(chain: *mut Ld3Chain) {
    release(chain);
}

/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ld3_ddm_new(out: *mut *mut Ld3Ddm) -> Ld3Status {
    guard(|| {
        if out.is_null() {
            return Ld3Status::NullPointer;
        }
        boxed(Ld3Ddm(Ddm::new()), out)
    })
}

/// Feeds one correctness bit.
///
/// # Safety
/// `ddm` must come from [`ld3_ddm_new`]; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ld3_ddm_update(
    ddm: *mut Ld3Ddm,
    correct: bool,
    out: *mut Ld3Phase,
) -> Ld3Status {
    guard(|| {
        let (Some(d), false) = (ddm.as_mut(), out.is_null()) else {
            return Ld3Status::NullPointer;
        };
        *out = d.0.update(ErrorSignal { correct }).into();
        Ld3Status::Ok
    })
}

/// # Safety
/// `ddm` must come from [`ld3_ddm_new`] or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ld3_ddm_free(ddm: *mut Ld3Ddm) {
    release(ddm);
}

/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ld3_eddm_new(out: *mut *mut Ld3Eddm) -> Ld3Status {
    guard(|| {
        if out.is_null() {
            return Ld3Status::NullPointer;
        }
        boxed(Ld3Eddm(Eddm::new()), out)
    })
}

/// Feeds one correctness bit.
///
/// # Safety
/// `eddm` must come from [`ld3_eddm_new`]; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ld3_eddm_update(
    eddm: *mut Ld3Eddm,
    correct: bool,
    out: *mut Ld3Phase,
) -> Ld3Status {
    guard(|| {
        let (Some(d), false) = (eddm.as_mut(), out.is_null()) else {
            return Ld3Status::NullPointer;
        };
        *out = d.0.update(ErrorSignal { correct }).into();
        Ld3Status::Ok
    })
}

/// # Safety
/// `eddm` must come from [`ld3_eddm_new`] or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ld3_eddm_free(eddm: *mut Ld3Eddm) {
    release(eddm);
}

/// Weighted rank correlation of two global orders (label indices, best first).
///
/// # Safety
/// `order_new` and `order_old` must each point to `n` values; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ld3_ws_coefficient(
    order_new: *const usize,
    order_old: *const usize,
    n: usize,
    out: *mut f64,
) -> Ld3Status {
    guard(|| {
        let (Some(a), Some(b), false) = (view(order_new, n), view(order_old, n), out.is_null())
        else {
            return Ld3Status::NullPointer;
        };
        let (Ok(a), Ok(b)) = (
            GlobalRanking::from_order(a.to_vec()),
            GlobalRanking::from_order(b.to_vec()),
        ) else {
            return Ld3Status::InvalidArgument;
        };
        match ws_coefficient(&a, &b) {
            Ok(c) => {
                *out = c;
                Ld3Status::Ok
            }
            Err(_) => Ld3Status::InvalidArgument,
        }
    })
}
