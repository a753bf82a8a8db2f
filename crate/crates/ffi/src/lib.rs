//! C ABI over `fade_core`.
//!
//! Datasets and predictors are opaque heap handles created by `*_load` /
//! `fade_synth_generate` and released with the matching `*_free`. Every
//! fallible call returns a [`FadeStatus`]; on failure the message is
//! available from [`fade_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fade_core::encoder::PreparedGraph;
use fade_core::error::{ErrorKind, FadeError};
use fade_core::graph::Dataset;
use fade_core::inference::{debias, predict, score};
use fade_core::predictors::{EventOnlyPredictor, TargetPredictor};
use fade_core::synth::{generate, SynthConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Data = 4,
    Io = 5,
    Numeric = 6,
    /// Output buffer smaller than required; nothing was written.
    BufferTooSmall = 7,
    Panic = 8,
}

/// A loaded dataset with its normalized adjacencies precomputed.
pub struct FadeDataset {
    dataset: Dataset,
    graphs: Vec<PreparedGraph>,
}

/// A trained target predictor paired with its event-only predictor.
pub struct FadePredictor {
    target: TargetPredictor,
    event_only: EventOnlyPredictor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FadeStatus, msg: impl Into<String>) -> FadeStatus {
    set_error(msg.into());
    status
}

fn from_core(e: FadeError) -> FadeStatus {
    let status = match e.kind() {
        ErrorKind::Config => FadeStatus::Config,
        ErrorKind::Data => FadeStatus::Data,
        ErrorKind::Io => FadeStatus::Io,
        ErrorKind::Numeric => FadeStatus::Numeric,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> FadeStatus) -> FadeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FadeStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, FadeStatus> {
    if p.is_null() {
        return Err(fail(FadeStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FadeStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

fn wrap(dataset: Dataset) -> Box<FadeDataset> {
    let graphs = dataset.instances.iter().map(|i| PreparedGraph::new(&i.graph)).collect();
    Box::new(FadeDataset { dataset, graphs })
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fade_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fade_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a JSON Lines dataset.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fade_dataset_load(path: *const c_char, out: *mut *mut FadeDataset) -> FadeStatus {
    guard(|| {
        if out.is_null() {
            return fail(FadeStatus::NullPointer, "out is null");
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match Dataset::load(path) {
            Ok(ds) => {
                *out = Box::into_raw(wrap(ds));
                FadeStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Generates a synthetic dataset from a named preset.
///
/// # Safety
/// `preset` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fade_synth_generate(
    preset: *const c_char,
    bias_strength: f64,
    seed: u64,
    out: *mut *mut FadeDataset,
) -> FadeStatus {
    guard(|| {
        if out.is_null() {
            return fail(FadeStatus::NullPointer, "out is null");
        }
        let preset = match str_arg(preset, "preset") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let cfg = match SynthConfig::preset(preset) {
            Ok(c) => SynthConfig {
                bias_strength,
                seed,
                ..c
            },
            Err(e) => return from_core(e),
        };
        match generate(&cfg) {
            Ok(ds) => {
                *out = Box::into_raw(wrap(ds));
                FadeStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Writes the dataset in the JSON Lines format.
///
/// # Safety
/// `ds` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fade_dataset_save(ds: *const FadeDataset, path: *const c_char) -> FadeStatus {
    guard(|| {
        let Some(ds) = ds.as_ref() else {
            return fail(FadeStatus::NullPointer, "dataset is null");
        };
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match ds.dataset.save(path) {
            Ok(()) => FadeStatus::Ok,
            Err(e) => from_core(e),
        }
    })
}

/// Number of instances; 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fade_dataset_len(ds: *const FadeDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.dataset.len())
}

/// Number of classes; 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fade_dataset_num_classes(ds: *const FadeDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.dataset.num_classes())
}

/// Copies the true labels into `out` (capacity `cap`).
///
/// # Safety
/// `ds` must be a live handle; `out` must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn fade_dataset_labels(ds: *const FadeDataset, out: *mut u32, cap: usize) -> FadeStatus {
    guard(|| {
        let Some(ds) = ds.as_ref() else {
            return fail(FadeStatus::NullPointer, "dataset is null");
        };
        let n = ds.dataset.len();
        if n > 0 && out.is_null() {
            return fail(FadeStatus::NullPointer, "out is null");
        }
        if cap < n {
            return fail(FadeStatus::BufferTooSmall, format!("need {n} labels, buffer holds {cap}"));
        }
        for (i, inst) in ds.dataset.instances.iter().enumerate() {
            *out.add(i) = inst.label as u32;
        }
        FadeStatus::Ok
    })
}

/// # Safety
/// `ds` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fade_dataset_free(ds: *mut FadeDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Loads both checkpoints written by `fade train`.
///
/// # Safety
/// Paths must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fade_predictor_load(
    target_path: *const c_char,
    event_only_path: *const c_char,
    out: *mut *mut FadePredictor,
) -> FadeStatus {
    guard(|| {
        if out.is_null() {
            return fail(FadeStatus::NullPointer, "out is null");
        }
        let (t, e) = match (str_arg(target_path, "target_path"), str_arg(event_only_path, "event_only_path")) {
            (Ok(t), Ok(e)) => (t, e),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let loaded = TargetPredictor::load(t).and_then(|target| Ok((target, EventOnlyPredictor::load(e)?)));
        match loaded {
            Ok((target, event_only)) if target.num_classes() != event_only.num_classes() => fail(
                FadeStatus::Data,
                format!(
                    "class count mismatch: target {}, event-only {}",
                    target.num_classes(),
                    event_only.num_classes()
                ),
            ),
            Ok((target, event_only)) => {
                *out = Box::into_raw(Box::new(FadePredictor { target, event_only }));
                FadeStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fade_predictor_num_classes(p: *const FadePredictor) -> usize {
    p.as_ref().map_or(0, |p| p.target.num_classes())
}

/// # Safety
/// `p` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fade_predictor_free(p: *mut FadePredictor) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Debiased prediction for every instance of `ds`, with event-only logits
/// pooled over each event's instances in `ds`.
///
/// Writes one class index per instance to `labels` (capacity `cap`) and, if
/// `logits` is not NULL, the debiased logits row-major into `logits`
/// (capacity `logits_cap`, needs len × classes).
///
/// # Safety
/// Handles must be live; buffers must hold the stated capacities.
#[no_mangle]
pub unsafe extern "C" fn fade_predict(
    p: *const FadePredictor,
    ds: *const FadeDataset,
    beta: f64,
    labels: *mut u32,
    cap: usize,
    logits: *mut f64,
    logits_cap: usize,
) -> FadeStatus {
    guard(|| {
        let (Some(p), Some(ds)) = (p.as_ref(), ds.as_ref()) else {
            return fail(FadeStatus::NullPointer, "predictor or dataset is null");
        };
        if !beta.is_finite() {
            return fail(FadeStatus::Config, format!("beta must be finite, got {beta}"));
        }
        let n = ds.dataset.len();
        let l = p.target.num_classes();
        if n > 0 && labels.is_null() {
            return fail(FadeStatus::NullPointer, "labels is null");
        }
        if cap < n {
            return fail(FadeStatus::BufferTooSmall, format!("need {n} labels, buffer holds {cap}"));
        }
        if !logits.is_null() && logits_cap < n * l {
            return fail(
                FadeStatus::BufferTooSmall,
                format!("need {} logits, buffer holds {logits_cap}", n * l),
            );
        }
        let indices: Vec<usize> = (0..n).collect();
        let preds = match score(&p.target, &p.event_only, &ds.dataset, &ds.graphs, &indices)
            .and_then(|s| predict(&s, beta))
        {
            Ok(v) => v,
            Err(e) => return from_core(e),
        };
        for (i, pred) in preds.iter().enumerate() {
            *labels.add(i) = pred.predicted as u32;
            if !logits.is_null() {
                for (c, v) in pred.debiased_logits.iter().enumerate() {
                    *logits.add(i * l + c) = *v;
                }
            }
        }
        FadeStatus::Ok
    })
}

/// `out[i] = target[i] - beta * event_only[i]` for `i < len`.
///
/// # Safety
/// All three buffers must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn fade_debias(
    target: *const f64,
    event_only: *const f64,
    len: usize,
    beta: f64,
    out: *mut f64,
) -> FadeStatus {
    guard(|| {
        if len == 0 {
            return FadeStatus::Ok;
        }
        if target.is_null() || event_only.is_null() || out.is_null() {
            return fail(FadeStatus::NullPointer, "buffer is null");
        }
        let t = std::slice::from_raw_parts(target, len);
        let e = std::slice::from_raw_parts(event_only, len);
        match debias(t, e, beta) {
            Ok(d) => {
                std::slice::from_raw_parts_mut(out, len).copy_from_slice(&d);
                FadeStatus::Ok
            }
            Err(err) => from_core(err),
        }
    })
}
