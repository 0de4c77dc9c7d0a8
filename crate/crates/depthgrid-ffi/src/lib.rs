//! C ABI for the depthgrid toolkit.
//!
//! Conventions: objects cross the boundary as opaque handles created and
//! destroyed by this library; every fallible call returns a [`DgStatus`] and
//! writes results through out-pointers; the most recent failure message is
//! retrievable per thread via [`dg_last_error`]. Strings are NUL-terminated
//! UTF-8. The generated header lives at `include/depthgrid.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::num::NonZeroUsize;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use depthgrid::anfis::{self, AnfisError, AnfisModel, Dataset, TrainConfig};
use depthgrid::bench;
use depthgrid::filters::{builtin_filter, FilterKind};
use depthgrid::holefill::{fill_holes, FillKernel};
use depthgrid::image::DepthImage;
use depthgrid::interp::{
    clamp_margin, crop_to_odd, downsample, upsample_bank, FilterBank, InterpError,
};
use depthgrid::metrics::{psnr, psnr_with_margin};
use depthgrid::pgm::{load_pgm, save_pgm, PgmError, PgmFormat};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgStatus {
    DgOk = 0,
    DgNullPointer = 1,
    DgInvalidArgument = 2,
    DgParseError = 3,
    DgIoError = 4,
    DgNumericError = 5,
}

/// Opaque depth image handle.
pub struct DgImage {
    inner: DepthImage,
}

/// Opaque trained-model handle.
pub struct DgModel {
    inner: AnfisModel,
}

/// Interpolation filter selector. Values match the model's numeric filter
/// ids.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgFilter {
    DgFilterGrid4 = 1,
    DgFilterLinearAverage = 2,
    DgFilterAvs4 = 3,
    DgFilterH264Six = 4,
}

impl From<DgFilter> for FilterKind {
    fn from(filter: DgFilter) -> Self {
        match filter {
            DgFilter::DgFilterGrid4 => FilterKind::Grid4,
            DgFilter::DgFilterLinearAverage => FilterKind::LinearAverage,
            DgFilter::DgFilterAvs4 => FilterKind::Avs4,
            DgFilter::DgFilterH264Six => FilterKind::H264Six,
        }
    }
}

/// Hole-filling outcome counters.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DgFillReport {
    pub passes_run: u32,
    pub holes_initial: u64,
    pub holes_remaining: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: DgStatus, message: impl AsRef<str>) -> DgStatus {
    set_error(message);
    status
}

fn pgm_status(err: &PgmError) -> DgStatus {
    match err {
        PgmError::Io { .. } => DgStatus::DgIoError,
        _ => DgStatus::DgParseError,
    }
}

fn anfis_status(err: &AnfisError) -> DgStatus {
    match err {
        AnfisError::Csv { .. } => DgStatus::DgParseError,
        AnfisError::InvalidConfig { .. }
        | AnfisError::EmptyDataset
        | AnfisError::MixedArity { .. }
        | AnfisError::ZeroRange { .. }
        | AnfisError::TooFewRows { .. }
        | AnfisError::NonFinite { .. }
        | AnfisError::ArityMismatch { .. } => DgStatus::DgInvalidArgument,
        _ => DgStatus::DgNumericError,
    }
}

/// Runs a body with panic containment so unwinding never crosses the ABI.
fn guarded(body: impl FnOnce() -> DgStatus) -> DgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(DgStatus::DgNumericError, "internal panic"),
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<PathBuf, DgStatus> {
    if ptr.is_null() {
        return Err(fail(DgStatus::DgNullPointer, "path is NULL"));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(text) => Ok(PathBuf::from(text)),
        Err(_) => Err(fail(DgStatus::DgInvalidArgument, "path is not UTF-8")),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> DgStatus {
    if out.is_null() {
        return fail(DgStatus::DgNullPointer, "out pointer is NULL");
    }
    out.write(value);
    DgStatus::DgOk
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the current thread's last error message (without the NUL) into
/// `buffer` and returns the full message length. A zero return means no
/// error has been recorded. `buffer` may be NULL to query the length.
///
/// # Safety
/// `buffer` must point to at least `capacity` writable bytes, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds an image from row-major samples.
///
/// # Safety
/// `samples` must point to `width * height` readable u16 values; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dg_image_new(
    width: u32,
    height: u32,
    max_value: u16,
    samples: *const u16,
    out: *mut *mut DgImage,
) -> DgStatus {
    guarded(|| {
        if samples.is_null() {
            return fail(DgStatus::DgNullPointer, "samples is NULL");
        }
        let data = std::slice::from_raw_parts(samples, width as usize * height as usize);
        match DepthImage::new(width as usize, height as usize, max_value, data.to_vec()) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(DgImage { inner }))),
            Err(err) => fail(DgStatus::DgInvalidArgument, err.to_string()),
        }
    })
}

/// Reads a PGM (P2 or P5) file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dg_image_load_pgm(
    path: *const c_char,
    out: *mut *mut DgImage,
) -> DgStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        match load_pgm(&path) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(DgImage { inner }))),
            Err(err) => fail(pgm_status(&err), err.to_string()),
        }
    })
}

/// Writes a PGM file; binary (P5) when `binary` is nonzero, plain (P2)
/// otherwise.
///
/// # Safety
/// `image` must be a live handle from this library; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dg_image_save_pgm(
    image: *const DgImage,
    path: *const c_char,
    binary: bool,
) -> DgStatus {
    guarded(|| {
        let Some(image) = image.as_ref() else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        let path = match path_from(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        let format = if binary {
            PgmFormat::Binary
        } else {
            PgmFormat::Plain
        };
        match save_pgm(&image.inner, &path, format) {
            Ok(()) => DgStatus::DgOk,
            Err(err) => fail(pgm_status(&err), err.to_string()),
        }
    })
}

/// Releases an image handle. NULL is a no-op.
///
/// # Safety
/// `image` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn dg_image_free(image: *mut DgImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Image width in pixels; 0 for NULL.
///
/// # Safety
/// `image` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_image_width(image: *const DgImage) -> u32 {
    image.as_ref().map_or(0, |i| i.inner.width() as u32)
}

/// Image height in pixels; 0 for NULL.
///
/// # Safety
/// `image` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_image_height(image: *const DgImage) -> u32 {
    image.as_ref().map_or(0, |i| i.inner.height() as u32)
}

/// Largest representable sample value; 0 for NULL.
///
/// # Safety
/// `image` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_image_max_value(image: *const DgImage) -> u16 {
    image.as_ref().map_or(0, |i| i.inner.max_value())
}

/// Copies up to `capacity` row-major samples into `buffer` and returns the
/// image's total sample count (call once with capacity 0 to size the
/// buffer).
///
/// # Safety
/// `buffer` must point to `capacity` writable u16 values, or be NULL when
/// `capacity` is 0.
#[no_mangle]
pub unsafe extern "C" fn dg_image_copy_samples(
    image: *const DgImage,
    buffer: *mut u16,
    capacity: usize,
) -> usize {
    let Some(image) = image.as_ref() else {
        return 0;
    };
    let samples = image.inner.samples();
    if !buffer.is_null() && capacity > 0 {
        let n = samples.len().min(capacity);
        std::ptr::copy_nonoverlapping(samples.as_ptr(), buffer, n);
    }
    samples.len()
}

/// Fills zero-valued holes by masked 3x3 weighted averaging, writing a new
/// image handle and (optionally) the pass/hole counters.
///
/// # Safety
/// `image` must be a live handle; `out_image` valid; `out_report` valid or
/// NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_fill_holes(
    image: *const DgImage,
    max_passes: u32,
    out_image: *mut *mut DgImage,
    out_report: *mut DgFillReport,
) -> DgStatus {
    guarded(|| {
        let Some(image) = image.as_ref() else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        let Some(passes) = NonZeroUsize::new(max_passes as usize) else {
            return fail(DgStatus::DgInvalidArgument, "max_passes must be at least 1");
        };
        let (filled, report) = fill_holes(&image.inner, &FillKernel::binomial(), passes);
        if !out_report.is_null() {
            out_report.write(DgFillReport {
                passes_run: report.passes_run as u32,
                holes_initial: report.holes_initial as u64,
                holes_remaining: report.holes_remaining as u64,
            });
        }
        write_out(
            out_image,
            Box::into_raw(Box::new(DgImage { inner: filled })),
        )
    })
}

/// Drops the last row/column as needed so both dimensions are odd.
///
/// # Safety
/// `image` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_crop_to_odd(image: *const DgImage, out: *mut *mut DgImage) -> DgStatus {
    guarded(|| {
        let Some(image) = image.as_ref() else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        let cropped = crop_to_odd(&image.inner);
        write_out(out, Box::into_raw(Box::new(DgImage { inner: cropped })))
    })
}

/// Halves both dimensions by phase-0 decimation. Dimensions must be odd
/// (see `dg_crop_to_odd`).
///
/// # Safety
/// `image` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_downsample(image: *const DgImage, out: *mut *mut DgImage) -> DgStatus {
    guarded(|| {
        let Some(image) = image.as_ref() else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        match downsample(&image.inner) {
            Ok(down) => write_out(out, Box::into_raw(Box::new(DgImage { inner: down }))),
            Err(err) => fail(DgStatus::DgInvalidArgument, err.to_string()),
        }
    })
}

/// Inserts `n_insert` interpolated samples per interval on both axes.
///
/// # Safety
/// `image` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_upsample(
    image: *const DgImage,
    filter: DgFilter,
    n_insert: u32,
    out: *mut *mut DgImage,
) -> DgStatus {
    guarded(|| {
        let Some(image) = image.as_ref() else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        let bank = match FilterBank::for_kind(filter.into(), n_insert as usize) {
            Ok(bank) => bank,
            Err(err) => return fail(DgStatus::DgInvalidArgument, err.to_string()),
        };
        match upsample_bank(&image.inner, &bank, &bank) {
            Ok(up) => write_out(out, Box::into_raw(Box::new(DgImage { inner: up }))),
            Err(err) => {
                let status = match err {
                    InterpError::TooShort { .. } | InterpError::EvenDimension { .. } => {
                        DgStatus::DgInvalidArgument
                    }
                    _ => DgStatus::DgNumericError,
                };
                fail(status, err.to_string())
            }
        }
    })
}

/// MSE and PSNR between two images of identical shape and peak value. A
/// perfect match reports `psnr_db = +INFINITY`.
///
/// # Safety
/// Handles must be live; out pointers valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_psnr(
    reference: *const DgImage,
    test: *const DgImage,
    out_mse: *mut f64,
    out_psnr_db: *mut f64,
) -> DgStatus {
    guarded(|| {
        let (Some(reference), Some(test)) = (reference.as_ref(), test.as_ref()) else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        match psnr(&reference.inner, &test.inner) {
            Ok(quality) => {
                if !out_mse.is_null() {
                    out_mse.write(quality.mse);
                }
                if !out_psnr_db.is_null() {
                    out_psnr_db.write(quality.psnr_db);
                }
                DgStatus::DgOk
            }
            Err(err) => fail(DgStatus::DgInvalidArgument, err.to_string()),
        }
    })
}

/// Full benchmark pipeline for one image and filter: hole-fill, crop,
/// halve, re-interpolate, score. With `interior_only`, scoring excludes the
/// boundary region the filter's edge clamping can touch.
///
/// # Safety
/// `image` must be a live handle; out pointers valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_pipeline_psnr(
    image: *const DgImage,
    filter: DgFilter,
    max_fill_passes: u32,
    interior_only: bool,
    out_mse: *mut f64,
    out_psnr_db: *mut f64,
) -> DgStatus {
    guarded(|| {
        let Some(image) = image.as_ref() else {
            return fail(DgStatus::DgNullPointer, "image is NULL");
        };
        let Some(passes) = NonZeroUsize::new(max_fill_passes as usize) else {
            return fail(
                DgStatus::DgInvalidArgument,
                "max_fill_passes must be at least 1",
            );
        };
        let kind: FilterKind = filter.into();
        let (reference, reconstruction) = match bench::pipeline_pair(&image.inner, kind, passes) {
            Ok(pair) => pair,
            Err(err) => return fail(DgStatus::DgNumericError, err.to_string()),
        };
        let margin = if interior_only {
            clamp_margin(&builtin_filter(kind), 1)
        } else {
            0
        };
        match psnr_with_margin(&reference, &reconstruction, margin) {
            Ok(quality) => {
                if !out_mse.is_null() {
                    out_mse.write(quality.mse);
                }
                if !out_psnr_db.is_null() {
                    out_psnr_db.write(quality.psnr_db);
                }
                DgStatus::DgOk
            }
            Err(err) => fail(DgStatus::DgInvalidArgument, err.to_string()),
        }
    })
}

/// Trains a PSNR prediction model from a `pixels,filter_id,psnr_db` CSV.
///
/// # Safety
/// `path` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_model_train_csv(
    path: *const c_char,
    rules: u32,
    epochs: u32,
    seed: u64,
    learning_rate: f64,
    holdout_fraction: f64,
    out: *mut *mut DgModel,
) -> DgStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        let config = TrainConfig {
            epochs: epochs as usize,
            learning_rate,
            n_rules: rules as usize,
            seed,
            holdout_fraction,
        };
        if let Err(err) = config.validate() {
            return fail(anfis_status(&err), err.to_string());
        }
        let dataset = match Dataset::read_csv(&path) {
            Ok(dataset) => dataset,
            Err(err) => return fail(anfis_status(&err), err.to_string()),
        };
        let trained = anfis::init_model(&dataset, &config)
            .and_then(|model| anfis::train(model, &dataset, &config));
        match trained {
            Ok((inner, _history)) => write_out(out, Box::into_raw(Box::new(DgModel { inner }))),
            Err(err) => fail(anfis_status(&err), err.to_string()),
        }
    })
}

/// Loads a model from its JSON document.
///
/// # Safety
/// `path` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_model_load_json(
    path: *const c_char,
    out: *mut *mut DgModel,
) -> DgStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(err) => return fail(DgStatus::DgIoError, format!("{}: {err}", path.display())),
        };
        match AnfisModel::from_json(&text) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(DgModel { inner }))),
            Err(err) => fail(DgStatus::DgParseError, err.to_string()),
        }
    })
}

/// Writes a model's JSON document.
///
/// # Safety
/// `model` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dg_model_save_json(
    model: *const DgModel,
    path: *const c_char,
) -> DgStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else {
            return fail(DgStatus::DgNullPointer, "model is NULL");
        };
        let path = match path_from(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        match std::fs::write(&path, model.inner.to_json()) {
            Ok(()) => DgStatus::DgOk,
            Err(err) => fail(DgStatus::DgIoError, format!("{}: {err}", path.display())),
        }
    })
}

/// Releases a model handle. NULL is a no-op.
///
/// # Safety
/// `model` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn dg_model_free(model: *mut DgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Predicts PSNR (dB) from raw inputs (pixel count, filter id). Inputs are
/// normalized internally with the transform stored in the model.
///
/// # Safety
/// `model` must be a live handle; `inputs` must point to `n_inputs` readable
/// values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dg_model_predict(
    model: *const DgModel,
    inputs: *const f64,
    n_inputs: usize,
    out: *mut f64,
) -> DgStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else {
            return fail(DgStatus::DgNullPointer, "model is NULL");
        };
        if inputs.is_null() {
            return fail(DgStatus::DgNullPointer, "inputs is NULL");
        }
        let raw = std::slice::from_raw_parts(inputs, n_inputs);
        match model.inner.predict(raw) {
            Ok(value) => write_out(out, value),
            Err(err) => fail(anfis_status(&err), err.to_string()),
        }
    })
}
