//! C interface to `qgraph`.
//!
//! Problems and spectra are opaque handles owned by the caller and released
//! with the matching `_free` function. Every function returns a [`QgStatus`];
//! on failure [`qg_last_error_message`] describes the error on the calling
//! thread. Panics are caught and reported as [`QgStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qgraph::io::parse_document;
use qgraph::secular::{find_spectrum, secular_value, verify_eigenfunction, SolverOptions};
use qgraph::{Error, ErrorCode, QuantumGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QgStatus {
    Ok = 0,
    InputError = 1,
    Inadmissible = 2,
    NumericalFailure = 3,
    NullPointer = 4,
    Panic = 5,
}

/// One eigenvalue. `verification` is NaN when the spectrum was computed
/// without eigenfunction verification.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QgRoot {
    pub k: f64,
    pub multiplicity: u32,
    pub unresolved: bool,
    /// Final bracket width relative to `k`.
    pub residual: f64,
    pub verification: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QgSolverOptions {
    pub q: f64,
    pub tol_root: f64,
    pub tol_cluster: f64,
    pub verify: bool,
    pub jobs: u32,
}

/// A parsed and validated problem document.
pub struct QgProblem {
    model: QuantumGraph,
    options: SolverOptions,
}

pub struct QgSpectrum {
    roots: Vec<QgRoot>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> QgStatus {
    set_error(&e.to_string());
    match e.code() {
        ErrorCode::Input => QgStatus::InputError,
        ErrorCode::Inadmissible => QgStatus::Inadmissible,
        ErrorCode::Numerical => QgStatus::NumericalFailure,
    }
}

fn null(what: &str) -> QgStatus {
    set_error(&format!("null pointer: {what}"));
    QgStatus::NullPointer
}

fn guard(f: impl FnOnce() -> QgStatus) -> QgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            QgStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, QgStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        QgStatus::InputError
    })
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn qg_solver_options_default() -> QgSolverOptions {
    let d = SolverOptions::default();
    QgSolverOptions {
        q: d.q,
        tol_root: d.tol_root,
        tol_cluster: d.tol_cluster,
        verify: true,
        jobs: 1,
    }
}

/// Parses a `.qg` JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_problem_from_json(json: *const c_char, out: *mut *mut QgProblem) -> QgStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let text = match c_str(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let doc = match parse_document(text) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        match doc.build() {
            Ok(model) => {
                *out = Box::into_raw(Box::new(QgProblem {
                    model,
                    options: doc.solver_options(),
                }));
                QgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `problem` must come from [`qg_problem_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qg_problem_free(problem: *mut QgProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Dimension of the evolution operator `U(k)`.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_problem_dimension(problem: *const QgProblem, out: *mut usize) -> QgStatus {
    guard(|| {
        let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
            return null("problem or out");
        };
        *out = p.model.dimension();
        QgStatus::Ok
    })
}

/// `det(I − U(k))` as a complex number.
///
/// # Safety
/// `problem` must be a live handle, `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qg_secular_value(problem: *const QgProblem, k: f64, re: *mut f64, im: *mut f64) -> QgStatus {
    guard(|| {
        let (Some(p), false, false) = (problem.as_ref(), re.is_null(), im.is_null()) else {
            return null("problem, re or im");
        };
        match secular_value(&p.model, k) {
            Ok(s) => {
                *re = s.det_value.re;
                *im = s.det_value.im;
                QgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Roots in `[k_min, k_max]`. `options` may be null, in which case the
/// document's solver settings are used.
///
/// # Safety
/// `problem` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qg_find_spectrum(
    problem: *const QgProblem,
    k_min: f64,
    k_max: f64,
    options: *const QgSolverOptions,
    out: *mut *mut QgSpectrum,
) -> QgStatus {
    guard(|| {
        let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
            return null("problem or out");
        };
        *out = ptr::null_mut();
        let mut opts = p.options.clone();
        if let Some(o) = options.as_ref() {
            opts.q = o.q;
            opts.tol_root = o.tol_root;
            opts.tol_cluster = o.tol_cluster;
            opts.verify = o.verify;
            opts.jobs = o.jobs.max(1) as usize;
        }
        match find_spectrum(&p.model, k_min, k_max, &opts) {
            Ok(sp) => {
                let roots = sp
                    .roots
                    .iter()
                    .map(|r| QgRoot {
                        k: r.k,
                        multiplicity: r.multiplicity as u32,
                        unresolved: r.unresolved,
                        residual: r.residual,
                        verification: r.verification.unwrap_or(f64::NAN),
                    })
                    .collect();
                *out = Box::into_raw(Box::new(QgSpectrum { roots }));
                QgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of distinct roots; 0 for a null handle.
///
/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_len(spectrum: *const QgSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.roots.len())
}

/// # Safety
/// `spectrum` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_root(spectrum: *const QgSpectrum, index: usize, out: *mut QgRoot) -> QgStatus {
    guard(|| {
        let (Some(s), false) = (spectrum.as_ref(), out.is_null()) else {
            return null("spectrum or out");
        };
        match s.roots.get(index) {
            Some(r) => {
                *out = *r;
                QgStatus::Ok
            }
            None => {
                set_error(&format!("root index {index} out of range (len {})", s.roots.len()));
                QgStatus::InputError
            }
        }
    })
}

/// # Safety
/// `spectrum` must come from [`qg_find_spectrum`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_free(spectrum: *mut QgSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Largest vertex-condition residual of the eigenfunctions at `k`;
/// fails with `NUMERICAL_FAILURE` if `k` is not an eigenvalue.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_verify_eigenfunction(problem: *const QgProblem, k: f64, out: *mut f64) -> QgStatus {
    guard(|| {
        let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
            return null("problem or out");
        };
        match verify_eigenfunction(&p.model, k) {
            Ok(r) => {
                *out = r;
                QgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Vertex scattering matrix at `vertex` and `k`, written row-major as
/// interleaved `(re, im)` pairs. `dim` always receives the matrix size; the
/// call fails with `INPUT_ERROR` if `capacity < 2 * dim * dim`.
///
/// # Safety
/// `problem` must be a live handle, `vertex` NUL-terminated, `dim` valid,
/// and `out` valid for `capacity` doubles (may be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn qg_vertex_scattering(
    problem: *const QgProblem,
    vertex: *const c_char,
    k: f64,
    out: *mut f64,
    capacity: usize,
    dim: *mut usize,
) -> QgStatus {
    guard(|| {
        let (Some(p), false) = (problem.as_ref(), dim.is_null()) else {
            return null("problem or dim");
        };
        let v = match c_str(vertex, "vertex") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let m = match p.model.vertex_scattering(v, k) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let d = m.nrows();
        *dim = d;
        if capacity < 2 * d * d || out.is_null() {
            set_error(&format!("buffer holds {capacity} doubles, need {}", 2 * d * d));
            return QgStatus::InputError;
        }
        let buf = std::slice::from_raw_parts_mut(out, 2 * d * d);
        for i in 0..d {
            for j in 0..d {
                buf[2 * (i * d + j)] = m[(i, j)].re;
                buf[2 * (i * d + j) + 1] = m[(i, j)].im;
            }
        }
        QgStatus::Ok
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
