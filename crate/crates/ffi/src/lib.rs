//! C ABI over `qqent`.
//!
//! States are opaque `QqState` handles owned by the caller and released with
//! `qq_state_free`. Matrices cross the boundary as row-major interleaved
//! `(re, im)` doubles. Every call returns a `QqStatus`; the message for the
//! last failure on the calling thread is available from `qq_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qqent::ls::{ls_explicit, ls_numeric, ls_residuals, LSDecomposition};
use qqent::measures::{min_sgx_i_concurrence, min_tgx_i_concurrence, subspace_concurrence_vector};
use qqent::numerics::{c64, partial_transpose_negativity, ComplexMatrix};
use qqent::states::{build_alpha_beta, build_epu_min_tgx, build_mems, e_mems, DensityMatrix, Spectrum};
use qqent::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QqStatus {
    Ok = 0,
    NullPointer = 1,
    /// Input failed validation (spectrum, entanglement range, matrix shape, ...).
    InvalidInput = 2,
    /// The state lacks the structural form the operation needs.
    FormPrecondition = 3,
    BufferTooSmall = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Opaque density matrix handle.
pub struct QqState {
    inner: DensityMatrix,
}

/// Scalar results of a Lewenstein-Sanpera decomposition, plus ρ_E and ρ_S as
/// interleaved row-major matrices of side `dim` (at most 6).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QqLsResult {
    pub p_e: f64,
    pub xi: [f64; 4],
    /// Entanglement of the pure part ρ_E.
    pub e_rho_e: f64,
    /// Reconstruction error, |p_E·E(ρ_E) − max{0, ξ₁−ξ₂−ξ₃−ξ₄}|, negativity of ρ_S.
    pub residuals: [f64; 3],
    pub dim: usize,
    pub rho_e: [f64; 72],
    pub rho_s: [f64; 72],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> QqStatus {
    set_error(format!("{}: {e}", e.kind()));
    if e.is_form_precondition() {
        QqStatus::FormPrecondition
    } else {
        QqStatus::InvalidInput
    }
}

fn guard(f: impl FnOnce() -> QqStatus) -> QqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            QqStatus::Internal
        }
    }
}

unsafe fn spectrum6(p: *const f64) -> Result<Spectrum, QqStatus> {
    if p.is_null() {
        return Err(QqStatus::NullPointer);
    }
    let v = std::slice::from_raw_parts(p, 6).to_vec();
    Spectrum::new(v).map_err(fail)
}

unsafe fn write_out<T>(out: *mut T, v: T) -> QqStatus {
    if out.is_null() {
        return QqStatus::NullPointer;
    }
    out.write(v);
    QqStatus::Ok
}

unsafe fn emit_state(out: *mut *mut QqState, r: qqent::Result<DensityMatrix>) -> QqStatus {
    if out.is_null() {
        return QqStatus::NullPointer;
    }
    match r {
        Ok(inner) => {
            out.write(Box::into_raw(Box::new(QqState { inner })));
            QqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

fn write_matrix(m: &ComplexMatrix, dst: &mut [f64]) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            dst[2 * (i * n + j)] = m[(i, j)].re;
            dst[2 * (i * n + j) + 1] = m[(i, j)].im;
        }
    }
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn qq_status_message(status: QqStatus) -> *const c_char {
    let s: &'static CStr = match status {
        QqStatus::Ok => c"ok",
        QqStatus::NullPointer => c"null pointer argument",
        QqStatus::InvalidInput => c"input failed validation",
        QqStatus::FormPrecondition => c"state does not have the required form",
        QqStatus::BufferTooSmall => c"output buffer too small",
        QqStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn qq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a state from `2·dim²` interleaved doubles with dim = n1·n2.
///
/// # Safety
/// `data` must point to `2·(n1·n2)²` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_state_from_matrix(
    data: *const f64,
    n1: usize,
    n2: usize,
    out: *mut *mut QqState,
) -> QqStatus {
    guard(|| {
        if data.is_null() {
            return QqStatus::NullPointer;
        }
        let n = n1 * n2;
        if n == 0 || n > 64 {
            set_error(format!("unsupported mode dims ({n1}, {n2})"));
            return QqStatus::InvalidInput;
        }
        let raw = std::slice::from_raw_parts(data, 2 * n * n);
        let m = ComplexMatrix::from_fn(n, n, |i, j| c64(raw[2 * (i * n + j)], raw[2 * (i * n + j) + 1]));
        emit_state(out, DensityMatrix::new(m, (n1, n2)))
    })
}

/// # Safety
/// `state` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qq_state_free(state: *mut QqState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Side length of the matrix, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qq_state_dim(state: *const QqState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.dim())
}

/// Copy the matrix into `out` (needs `2·dim²` doubles).
///
/// # Safety
/// `state` must be a live handle; `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qq_state_matrix(state: *const QqState, out: *mut f64, len: usize) -> QqStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return QqStatus::NullPointer };
        if out.is_null() {
            return QqStatus::NullPointer;
        }
        let n = s.inner.dim();
        if len < 2 * n * n {
            return QqStatus::BufferTooSmall;
        }
        write_matrix(s.inner.matrix(), std::slice::from_raw_parts_mut(out, 2 * n * n));
        QqStatus::Ok
    })
}

/// # Safety
/// `spectrum` must point to 6 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_build_epu_min_tgx(
    spectrum: *const f64,
    e: f64,
    out: *mut *mut QqState,
) -> QqStatus {
    guard(|| match spectrum6(spectrum) {
        Ok(s) => emit_state(out, build_epu_min_tgx(&s, e).map(|r| r.0)),
        Err(st) => st,
    })
}

/// # Safety
/// `spectrum` must point to 6 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_build_mems(spectrum: *const f64, out: *mut *mut QqState) -> QqStatus {
    guard(|| match spectrum6(spectrum) {
        Ok(s) => emit_state(out, build_mems(&s)),
        Err(st) => st,
    })
}

/// # Safety
/// `spectrum` must point to 6 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_build_alpha_beta(
    spectrum: *const f64,
    alpha: f64,
    beta: f64,
    out: *mut *mut QqState,
) -> QqStatus {
    guard(|| match spectrum6(spectrum) {
        Ok(s) => emit_state(out, build_alpha_beta(&s, alpha, beta)),
        Err(st) => st,
    })
}

/// λ₁ − λ₅ − 2√(λ₄λ₆), unclipped.
///
/// # Safety
/// `spectrum` must point to 6 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_e_mems(spectrum: *const f64, out: *mut f64) -> QqStatus {
    guard(|| match spectrum6(spectrum) {
        Ok(s) => write_out(out, e_mems(&s)),
        Err(st) => st,
    })
}

unsafe fn scalar(
    state: *const QqState,
    out: *mut f64,
    f: impl FnOnce(&DensityMatrix) -> qqent::Result<f64>,
) -> QqStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return QqStatus::NullPointer };
        match f(&s.inner) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_min_tgx_i_concurrence(state: *const QqState, out: *mut f64) -> QqStatus {
    scalar(state, out, min_tgx_i_concurrence)
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_min_sgx_i_concurrence(state: *const QqState, out: *mut f64) -> QqStatus {
    scalar(state, out, min_sgx_i_concurrence)
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_negativity(state: *const QqState, out: *mut f64) -> QqStatus {
    scalar(state, out, |r| Ok(partial_transpose_negativity(r)))
}

/// Quartet concurrences in the order {1,2,4,5}, {1,3,4,6}, {2,3,5,6}.
///
/// # Safety
/// `state` must be a live handle; `out` must hold 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qq_subspace_concurrences(state: *const QqState, out: *mut f64) -> QqStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return QqStatus::NullPointer };
        if out.is_null() {
            return QqStatus::NullPointer;
        }
        match subspace_concurrence_vector(&s.inner) {
            Ok(v) => {
                std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&v);
                QqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

fn ls_result(rho: &DensityMatrix, d: &LSDecomposition) -> QqLsResult {
    let mut r = QqLsResult {
        p_e: d.p_e,
        xi: d.xi,
        e_rho_e: d.entangled_part_entanglement(),
        residuals: ls_residuals(rho, d),
        dim: rho.dim(),
        rho_e: [0.0; 72],
        rho_s: [0.0; 72],
    };
    write_matrix(d.rho_e.matrix(), &mut r.rho_e);
    write_matrix(&d.rho_s, &mut r.rho_s);
    r
}

/// Closed-form decomposition of the EPU-minimal TGX state of (λ, E).
///
/// # Safety
/// `spectrum` must point to 6 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_ls_explicit(spectrum: *const f64, e: f64, out: *mut QqLsResult) -> QqStatus {
    guard(|| {
        let s = match spectrum6(spectrum) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let r = build_epu_min_tgx(&s, e).and_then(|(rho, _)| Ok((ls_explicit(&s, e)?, rho)));
        match r {
            Ok((d, rho)) => write_out(out, ls_result(&rho, &d)),
            Err(e) => fail(e),
        }
    })
}

/// Numeric decomposition of a minimal SGX (or 2×2) state.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_ls_numeric(state: *const QqState, out: *mut QqLsResult) -> QqStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return QqStatus::NullPointer };
        if s.inner.dim() > 6 {
            set_error("decompositions need dimension at most 6".into());
            return QqStatus::InvalidInput;
        }
        match ls_numeric(&s.inner) {
            Ok(d) => write_out(out, ls_result(&s.inner, &d)),
            Err(e) => fail(e),
        }
    })
}
