// SPDX-License-Identifier: Apache-2.0

//! C ABI over `hqc-core` classifiers.
//!
//! Models are opaque `HqcModel` handles. Every fallible call returns an `HqcStatus`; on failure
//! `hqc_last_error` describes the most recent error on the calling thread. Strings returned by
//! the library are released with `hqc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hqc_core::data::encode_features;
use hqc_core::gates::GateKind;
use hqc_core::linalg::C64;
use hqc_core::sim::Statevector;
use hqc_core::topology::{
    export_qasm, label_from_expectation, ClassifierModel, Layout, ParamVector,
};
use hqc_core::trainer::{load_checkpoint, save_checkpoint, Checkpoint};
use hqc_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HqcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    Io = 5,
    Parse = 6,
    Version = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HqcLayout {
    Ttn = 0,
    Mera = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HqcGateKind {
    SimpleReal = 0,
    SimpleComplex = 1,
    GeneralReal = 2,
    GeneralComplex = 3,
    AncillaReal = 4,
    AncillaComplex = 5,
}

/// Opaque classifier: circuit layout plus parameters.
pub struct HqcModel {
    checkpoint: Checkpoint,
    model: ClassifierModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HqcStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::ParamCountMismatch { .. } => {
            HqcStatus::DimensionMismatch
        }
        Error::UnsupportedKind(_) | Error::UnsupportedSize(_) | Error::TooManyQubits { .. } => {
            HqcStatus::Unsupported
        }
        Error::Io(_) | Error::TruncatedFile(_) => HqcStatus::Io,
        Error::Json(_) | Error::Parse { .. } | Error::MagicMismatch { .. } => HqcStatus::Parse,
        Error::Version { .. } => HqcStatus::Version,
        _ => HqcStatus::InvalidArgument,
    }
}

struct Failure(HqcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HqcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HqcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HqcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HqcStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    // SAFETY: the caller passes a NUL-terminated string that outlives this call.
    unsafe { CStr::from_ptr(path) }
        .to_str()
        .map_err(|_| Failure(HqcStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn model_ref<'a>(model: *const HqcModel) -> Result<&'a HqcModel, Failure> {
    // SAFETY: non-null handles come from `hqc_model_new` or `hqc_model_load`.
    unsafe { model.as_ref() }.ok_or_else(|| null("model"))
}

unsafe fn slice_arg<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if data.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller guarantees `len` readable elements at `data`.
    Ok(unsafe { std::slice::from_raw_parts(data, len) })
}

fn box_model(handle: HqcModel, out: *mut *mut HqcModel) {
    // SAFETY: `out` was checked to be non-null by the caller of this helper.
    unsafe { *out = Box::into_raw(Box::new(handle)) };
}

/// Message describing the last failed call on this thread; empty if none. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hqc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New classifier with all parameters zero (every block the identity for exponential-map kinds).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_new(
    layout: HqcLayout,
    kind: HqcGateKind,
    n_qubits: usize,
    out: *mut *mut HqcModel,
) -> HqcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let layout = match layout {
            HqcLayout::Ttn => Layout::Ttn,
            HqcLayout::Mera => Layout::Mera,
        };
        let kind = match kind {
            HqcGateKind::SimpleReal => GateKind::SimpleReal,
            HqcGateKind::SimpleComplex => GateKind::SimpleComplex,
            HqcGateKind::GeneralReal => GateKind::GeneralReal,
            HqcGateKind::GeneralComplex => GateKind::GeneralComplex,
            HqcGateKind::AncillaReal => GateKind::AncillaReal,
            HqcGateKind::AncillaComplex => GateKind::AncillaComplex,
        };
        let model = ClassifierModel::build(layout, n_qubits, kind)?;
        let checkpoint = Checkpoint::new(&model, &ParamVector::zeros(model.n_params))?;
        box_model(HqcModel { checkpoint, model }, out);
        Ok(())
    })
}

/// Loads a JSON checkpoint.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_load(path: *const c_char, out: *mut *mut HqcModel) -> HqcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let path = unsafe { path_arg(path) }?;
        let checkpoint = load_checkpoint(path)?;
        let model = checkpoint.model()?;
        box_model(HqcModel { checkpoint, model }, out);
        Ok(())
    })
}

/// Writes the model as a JSON checkpoint, keeping any training metadata it was loaded with.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_save(model: *const HqcModel, path: *const c_char) -> HqcStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let (m, path) = unsafe { (model_ref(model)?, path_arg(path)?) };
        save_checkpoint(&m.checkpoint, path)?;
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_free(model: *mut HqcModel) {
    if !model.is_null() {
        // SAFETY: the handle was created by `Box::into_raw` and is freed once.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Parameter count, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_num_params(model: *const HqcModel) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { model.as_ref() }.map_or(0, |m| m.model.n_params)
}

/// Data qubits (input features), or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_num_qubits(model: *const HqcModel) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { model.as_ref() }.map_or(0, |m| m.model.n_data_qubits)
}

/// Copies the parameters into `out`, which must hold exactly `hqc_model_num_params` values.
///
/// # Safety
/// `model` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_get_params(
    model: *const HqcModel,
    out: *mut f64,
    len: usize,
) -> HqcStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let m = unsafe { model_ref(model) }?;
        let params = m.checkpoint.params.as_slice();
        if len != params.len() {
            return Err(Error::DimensionMismatch {
                expected: params.len(),
                found: len,
            }
            .into());
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: `out` holds `len` elements and does not alias the model.
        unsafe { ptr::copy_nonoverlapping(params.as_ptr(), out, len) };
        Ok(())
    })
}

/// Replaces the parameters; `len` must equal `hqc_model_num_params`.
///
/// # Safety
/// `model` must be a live handle and `params` valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_set_params(
    model: *mut HqcModel,
    params: *const f64,
    len: usize,
) -> HqcStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let m = unsafe { model.as_mut() }.ok_or_else(|| null("model"))?;
        // SAFETY: forwarded caller contract.
        let values = unsafe { slice_arg(params, len, "params") }?;
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Failure(
                HqcStatus::InvalidArgument,
                "parameters must be finite".into(),
            ));
        }
        let p = ParamVector::new(values.to_vec());
        m.model.check_params(&p)?;
        m.checkpoint.params = p;
        Ok(())
    })
}

/// Probability of outcome 0 on the readout and the thresholded label for one example whose
/// features are already angles, one per data qubit.
///
/// # Safety
/// `model` must be a live handle, `angles` valid for `n` reads, and each output pointer either
/// null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_predict(
    model: *const HqcModel,
    angles: *const f64,
    n: usize,
    p0_out: *mut f64,
    label_out: *mut u8,
) -> HqcStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let (m, x) = unsafe { (model_ref(model)?, slice_arg(angles, n, "angles")?) };
        if n != m.model.n_data_qubits {
            return Err(Error::DimensionMismatch {
                expected: m.model.n_data_qubits,
                found: n,
            }
            .into());
        }
        let p = m
            .model
            .predict_expectation(&m.checkpoint.params, &encode_features(x)?)?;
        // SAFETY: outputs are null or valid for one write.
        unsafe { write_outputs(p, p0_out, label_out) };
        Ok(())
    })
}

/// Like `hqc_model_predict` for an arbitrary normalized input state given as `2^n` amplitudes.
///
/// # Safety
/// `re` and `im` must be valid for `dim` reads; outputs as in `hqc_model_predict`.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_predict_state(
    model: *const HqcModel,
    re: *const f64,
    im: *const f64,
    dim: usize,
    p0_out: *mut f64,
    label_out: *mut u8,
) -> HqcStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let (m, re, im) = unsafe {
            (
                model_ref(model)?,
                slice_arg(re, dim, "re")?,
                slice_arg(im, dim, "im")?,
            )
        };
        let amps = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let state = Statevector::from_amplitudes(amps)?;
        let p = m.model.predict_expectation(&m.checkpoint.params, &state)?;
        // SAFETY: outputs are null or valid for one write.
        unsafe { write_outputs(p, p0_out, label_out) };
        Ok(())
    })
}

unsafe fn write_outputs(p: f64, p0_out: *mut f64, label_out: *mut u8) {
    // SAFETY: each pointer is null or valid for one write.
    unsafe {
        if let Some(o) = p0_out.as_mut() {
            *o = p;
        }
        if let Some(o) = label_out.as_mut() {
            *o = label_from_expectation(p);
        }
    }
}

/// OpenQASM 2.0 text of a `SimpleReal` model. Free the result with `hqc_string_free`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hqc_model_export_qasm(
    model: *const HqcModel,
    out: *mut *mut c_char,
) -> HqcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let m = unsafe { model_ref(model) }?;
        let text = export_qasm(&m.model, &m.checkpoint.params)?;
        let c = CString::new(text)
            .map_err(|_| Failure(HqcStatus::Panic, "QASM contains NUL".into()))?;
        // SAFETY: `out` is valid for one write.
        unsafe { *out = c.into_raw() };
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hqc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` and freed once.
        drop(unsafe { CString::from_raw(s) });
    }
}
