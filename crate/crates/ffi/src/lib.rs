//! C ABI for hadspec.
//!
//! Every fallible function returns an [`HsStatus`]; on failure a description is
//! available from [`hs_last_error_message`] on the same thread. Specs and
//! spectrum levels are opaque handles released with their `_free` functions.
//! Strings returned through `char **` are released with [`hs_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use hadspec::convolution::{fourier_finite, fourier_tail, mask, ConvolutionSpec};
use hadspec::spectrum::{build_spectrum, SpectrumLevels, SpectrumParams};
use hadspec::triples::{difference_gcd, verify_triple};
use hadspec::verify::spectral_report;
use hadspec::zeros::mask_zeros;
use hadspec::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    VerificationFailed = 3,
    EquiPositivityViolation = 4,
    HorizonExhausted = 5,
    DepthTooLarge = 6,
    Json = 7,
    Internal = 8,
}

/// Opaque convolution spec: a family of Hadamard triples and a selection word.
pub struct HsSpec(ConvolutionSpec);

/// Opaque spectrum levels `Lambda_0, Lambda_1, ...`.
pub struct HsLevels(SpectrumLevels);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(HsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NotHadamard { .. } => HsStatus::VerificationFailed,
            Error::EquiPositivityViolation { .. } => HsStatus::EquiPositivityViolation,
            Error::HorizonExhausted { .. } => HsStatus::HorizonExhausted,
            Error::DepthTooLarge { .. } | Error::Overflow(_) => HsStatus::DepthTooLarge,
            Error::Json(_) => HsStatus::Json,
            _ => HsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(HsStatus::NullPointer, format!("{name} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(HsStatus::InvalidArgument, message.into())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HsStatus::Internal
        }
    }
}

unsafe fn int_slice<'a>(data: *const i64, len: usize, name: &str) -> Result<&'a [i64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn spec_ref<'a>(spec: *const HsSpec) -> Result<&'a ConvolutionSpec, Failure> {
    spec.as_ref().map(|s| &s.0).ok_or_else(|| null("spec"))
}

unsafe fn levels_ref<'a>(levels: *const HsLevels) -> Result<&'a SpectrumLevels, Failure> {
    levels.as_ref().map(|l| &l.0).ok_or_else(|| null("levels"))
}

fn into_c_string(text: String) -> Result<*mut c_char, Failure> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| Failure(HsStatus::Internal, "string contains a NUL byte".into()))
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next hadspec call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks unitarity of `(N, B, L)`. A non-Hadamard triple is reported through
/// `passed`, not the status; `max_deviation` is NaN when sizes differ.
#[no_mangle]
pub unsafe extern "C" fn hs_verify_triple(
    scale: i64,
    digits: *const i64,
    n_digits: usize,
    frequencies: *const i64,
    n_frequencies: usize,
    tol: f64,
    passed: *mut bool,
    max_deviation: *mut f64,
) -> HsStatus {
    guard(|| {
        let b = int_slice(digits, n_digits, "digits")?;
        let l = int_slice(frequencies, n_frequencies, "frequencies")?;
        let report = verify_triple(scale, b, l, tol)?;
        write(passed, report.passed, "passed")?;
        if !max_deviation.is_null() {
            max_deviation.write(report.max_deviation.unwrap_or(f64::NAN));
        }
        Ok(())
    })
}

/// `gcd` of the pairwise differences of `B`; 0 for fewer than two digits or NULL.
#[no_mangle]
pub unsafe extern "C" fn hs_difference_gcd(digits: *const i64, n_digits: usize) -> u64 {
    match int_slice(digits, n_digits, "digits") {
        Ok(b) => difference_gcd(b),
        Err(_) => 0,
    }
}

/// `M_B(xi)`.
#[no_mangle]
pub unsafe extern "C" fn hs_mask(digits: *const i64, n_digits: usize, xi: f64, re: *mut f64, im: *mut f64) -> HsStatus {
    guard(|| {
        let b = int_slice(digits, n_digits, "digits")?;
        if b.is_empty() {
            return Err(invalid("empty digit set"));
        }
        let v = mask(b, xi);
        write(re, v.re, "re")?;
        write(im, v.im, "im")
    })
}

/// Zeros of `M_B` in `[lo, hi]`. `count` receives the total number of zeros;
/// at most `capacity` values are written to `out` (which may be NULL when
/// `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn hs_mask_zeros(
    digits: *const i64,
    n_digits: usize,
    lo: f64,
    hi: f64,
    out: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> HsStatus {
    guard(|| {
        let b = int_slice(digits, n_digits, "digits")?;
        let report = mask_zeros(b, lo, hi)?;
        if capacity > 0 && out.is_null() {
            return Err(null("out"));
        }
        for (i, z) in report.zeros.iter().take(capacity).enumerate() {
            out.add(i).write(z.value);
        }
        write(count, report.zeros.len(), "count")
    })
}

/// Parses a spec from JSON:
/// `{"family": [{"N": 4, "B": [0, 2], "L": [0, 1]}], "word": {"prefix": [], "period": [1]}}`.
#[no_mangle]
pub unsafe extern "C" fn hs_spec_from_json(json: *const c_char, out: *mut *mut HsSpec) -> HsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("spec JSON is not UTF-8"))?;
        let spec: ConvolutionSpec = serde_json::from_str(text).map_err(|e| Failure(HsStatus::Json, e.to_string()))?;
        out.write(Box::into_raw(Box::new(HsSpec(spec))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hs_spec_free(spec: *mut HsSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Transform of the `n`-th level measure at `xi`.
#[no_mangle]
pub unsafe extern "C" fn hs_fourier_finite(spec: *const HsSpec, n: usize, xi: f64, re: *mut f64, im: *mut f64) -> HsStatus {
    guard(|| {
        let v = fourier_finite(spec_ref(spec)?, n, xi);
        write(re, v.re, "re")?;
        write(im, v.im, "im")
    })
}

/// Transform of the tail after `skip` factors, truncated at `depth`, with a
/// bound on the truncation error.
#[no_mangle]
pub unsafe extern "C" fn hs_fourier_tail(
    spec: *const HsSpec,
    skip: usize,
    depth: usize,
    xi: f64,
    re: *mut f64,
    im: *mut f64,
    bound: *mut f64,
) -> HsStatus {
    guard(|| {
        let v = fourier_tail(&spec_ref(spec)?.tail(skip), xi, depth);
        write(re, v.re, "re")?;
        write(im, v.im, "im")?;
        write(bound, v.bound, "bound")
    })
}

/// Builds `levels` spectrum levels. Nonpositive `delta`/`epsilon`, negative
/// `kmax` or zero `depth` select the defaults.
#[no_mangle]
pub unsafe extern "C" fn hs_build_spectrum(
    spec: *const HsSpec,
    levels: usize,
    delta: f64,
    epsilon: f64,
    kmax: i64,
    depth: usize,
    out: *mut *mut HsLevels,
) -> HsStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = SpectrumParams::default();
        let params = SpectrumParams {
            delta: if delta > 0.0 { delta } else { d.delta },
            epsilon: if epsilon > 0.0 { epsilon } else { d.epsilon },
            kmax: if kmax >= 0 { kmax } else { d.kmax },
            depth: if depth > 0 { depth } else { d.depth },
            ..d
        };
        let built = build_spectrum(spec, levels, &params)?;
        out.write(Box::into_raw(Box::new(HsLevels(built))));
        Ok(())
    })
}

/// Parses levels previously produced by [`hs_levels_to_json`].
#[no_mangle]
pub unsafe extern "C" fn hs_levels_from_json(json: *const c_char, out: *mut *mut HsLevels) -> HsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("levels JSON is not UTF-8"))?;
        let levels = SpectrumLevels::from_json(text)?;
        out.write(Box::into_raw(Box::new(HsLevels(levels))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hs_levels_free(levels: *mut HsLevels) {
    if !levels.is_null() {
        drop(Box::from_raw(levels));
    }
}

/// Number of constructed levels, not counting `Lambda_0`; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn hs_levels_count(levels: *const HsLevels) -> usize {
    levels.as_ref().map_or(0, |l| l.0.count())
}

/// `m_i` for level `i` (`m_0 = 0`).
#[no_mangle]
pub unsafe extern "C" fn hs_levels_index(levels: *const HsLevels, i: usize, m: *mut usize) -> HsStatus {
    guard(|| {
        let l = levels_ref(levels)?;
        let v = *l
            .indices
            .get(i)
            .ok_or_else(|| invalid(format!("level {i} out of range")))?;
        write(m, v, "m")
    })
}

/// Copies `Lambda_i` (sorted) into `out`. `len` receives `#Lambda_i`; at most
/// `capacity` entries are written.
#[no_mangle]
pub unsafe extern "C" fn hs_levels_get(
    levels: *const HsLevels,
    i: usize,
    out: *mut i64,
    capacity: usize,
    len: *mut usize,
) -> HsStatus {
    guard(|| {
        let l = levels_ref(levels)?;
        let level = l
            .levels
            .get(i)
            .ok_or_else(|| invalid(format!("level {i} out of range")))?;
        if capacity > 0 && out.is_null() {
            return Err(null("out"));
        }
        let n = level.len().min(capacity);
        if n > 0 {
            ptr::copy_nonoverlapping(level.as_ptr(), out, n);
        }
        write(len, level.len(), "len")
    })
}

/// Serializes the levels; release the string with [`hs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_levels_to_json(levels: *const HsLevels, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let l = levels_ref(levels)?;
        let text = l.to_json()?;
        write(out, into_c_string(text)?, "out")
    })
}

/// Completeness report of the top level as JSON. `passed` is false when the
/// report fails or is not applicable.
#[no_mangle]
pub unsafe extern "C" fn hs_spectral_report(
    spec: *const HsSpec,
    levels: *const HsLevels,
    grid_n: usize,
    depth: usize,
    passed: *mut bool,
    json: *mut *mut c_char,
) -> HsStatus {
    guard(|| {
        let report = spectral_report(spec_ref(spec)?, levels_ref(levels)?, grid_n, depth)?;
        write(passed, report.passed(), "passed")?;
        if !json.is_null() {
            let text = serde_json::to_string(&report).map_err(|e| Failure(HsStatus::Json, e.to_string()))?;
            json.write(into_c_string(text)?);
        }
        Ok(())
    })
}
