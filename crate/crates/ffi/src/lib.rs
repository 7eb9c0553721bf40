// SPDX-License-Identifier: Apache-2.0

//! C ABI for `roughlift`.
//!
//! Conventions:
//! - every fallible call returns an [`RlStatus`]; on failure a message is kept
//!   per thread and can be read with [`rl_last_error_message`];
//! - objects are opaque handles created by `rl_*_new`-style calls and released
//!   with the matching `rl_*_free`;
//! - matrices are row-major `double` arrays, paths are `n_points × dim` row-major.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use roughlift::gauss::{sample_fbm, FbmMethod, SamplerSpec};
use roughlift::leadlag::{leadlag_renorm, psi_closed};
use roughlift::linalg::{lyapunov_c, renorm_v, StableDrift};
use roughlift::nalgebra::DMatrix;
use roughlift::tensor2::{holder_distance, lift_piecewise_linear, LiftedPath, RenormTerm};
use roughlift::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotStable = 4,
    Numerical = 5,
    Panic = 6,
}

/// Opaque lifted path.
pub struct RlLiftedPath(LiftedPath);

/// Opaque stable drift `M = A - B`.
pub struct RlDrift(StableDrift);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlFbmMethod {
    Circulant = 0,
    Cholesky = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> RlStatus {
    match err {
        Error::DimensionMismatch { .. } | Error::GridMismatch => RlStatus::DimensionMismatch,
        Error::NotStable { .. } => RlStatus::NotStable,
        Error::Singular(_) | Error::NotPsd { .. } | Error::NonFinite(_) => RlStatus::Numerical,
        _ => RlStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), RlStatus>>(f: F) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RlStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside roughlift".into());
            RlStatus::Panic
        }
    }
}

fn check<T>(r: roughlift::Result<T>) -> Result<T, RlStatus> {
    r.map_err(|e| {
        let status = status_of(&e);
        set_error(e.to_string());
        status
    })
}

fn null(what: &str) -> RlStatus {
    set_error(format!("null pointer: {what}"));
    RlStatus::NullPointer
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], RlStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], RlStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

fn write_matrix(m: &DMatrix<f64>, out: &mut [f64]) {
    let n = m.ncols();
    for i in 0..m.nrows() {
        for j in 0..n {
            out[i * n + j] = m[(i, j)];
        }
    }
}

fn read_matrix(data: &[f64], dim: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(dim, dim, data)
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Lift the piecewise-linear path through `points` (`n_points × dim`) at `times`.
///
/// # Safety
/// `times` must hold `n_points` values, `points` `n_points * dim` values, and
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn rl_path_lift_piecewise_linear(
    times: *const f64,
    points: *const f64,
    n_points: usize,
    dim: usize,
    out: *mut *mut RlLiftedPath,
) -> RlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = input(times, n_points, "times")?;
        let p = input(points, n_points * dim, "points")?;
        let rows: Vec<&[f64]> = if dim == 0 { vec![&[][..]; n_points] } else { p.chunks(dim).collect() };
        let lift = check(lift_piecewise_linear(t, &rows))?;
        *out = Box::into_raw(Box::new(RlLiftedPath(lift)));
        Ok(())
    })
}

/// # Safety
/// `path` must be null or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rl_path_free(path: *mut RlLiftedPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Number of grid points; 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_path_len(path: *const RlLiftedPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.len())
}

/// Path dimension; 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_path_dim(path: *const RlLiftedPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.dim())
}

/// Increment lift between grid points `i ≤ j`: `level1` gets `dim` values,
/// `level2` gets `dim * dim` row-major values.
///
/// # Safety
/// `path` must be a live handle and the outputs large enough.
#[no_mangle]
pub unsafe extern "C" fn rl_path_interval(
    path: *const RlLiftedPath,
    i: usize,
    j: usize,
    level1: *mut f64,
    level2: *mut f64,
) -> RlStatus {
    guard(|| {
        let p = &path.as_ref().ok_or_else(|| null("path"))?.0;
        if i > j || j >= p.len() {
            set_error(format!("interval ({i}, {j}) outside a path of {} points", p.len()));
            return Err(RlStatus::InvalidArgument);
        }
        let d = p.dim();
        let l1 = output(level1, d, "level1")?;
        let l2 = output(level2, d * d, "level2")?;
        let s = p.interval(i, j);
        l1.copy_from_slice(s.level1().as_slice());
        write_matrix(s.level2(), l2);
        Ok(())
    })
}

/// New handle with every interval lift shifted by `(t - s) v` on level 2.
///
/// # Safety
/// `path` must be a live handle, `v` must hold `dim * dim` values, `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn rl_path_translate(
    path: *const RlLiftedPath,
    v: *const f64,
    out: *mut *mut RlLiftedPath,
) -> RlStatus {
    guard(|| {
        let p = &path.as_ref().ok_or_else(|| null("path"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = p.dim();
        let v = check(RenormTerm::new(read_matrix(input(v, d * d, "v")?, d)))?;
        let moved = check(p.translate(&v))?;
        *out = Box::into_raw(Box::new(RlLiftedPath(moved)));
        Ok(())
    })
}

/// Inhomogeneous α-Hölder distance between two lifts on the same grid.
///
/// # Safety
/// `x`, `y` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_holder_distance(
    x: *const RlLiftedPath,
    y: *const RlLiftedPath,
    alpha: f64,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        let x = &x.as_ref().ok_or_else(|| null("x"))?.0;
        let y = &y.as_ref().ok_or_else(|| null("y"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = check(holder_distance(x, y, alpha))?;
        Ok(())
    })
}

/// Drift `M = A - B` from symmetric positive definite `A` and antisymmetric `B`.
///
/// # Safety
/// `a`, `b` must hold `dim * dim` values and `out` must be a valid slot.
#[no_mangle]
pub unsafe extern "C" fn rl_drift_new(
    a: *const f64,
    b: *const f64,
    dim: usize,
    out: *mut *mut RlDrift,
) -> RlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = read_matrix(input(a, dim * dim, "a")?, dim);
        let b = read_matrix(input(b, dim * dim, "b")?, dim);
        let drift = check(StableDrift::new(a, b))?;
        *out = Box::into_raw(Box::new(RlDrift(drift)));
        Ok(())
    })
}

/// # Safety
/// `drift` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_drift_free(drift: *mut RlDrift) {
    if !drift.is_null() {
        drop(Box::from_raw(drift));
    }
}

/// Stationary covariance `C` with `MC + CM^T = I`, written row-major.
///
/// # Safety
/// `drift` must be a live handle and `out` hold `dim * dim` values.
#[no_mangle]
pub unsafe extern "C" fn rl_lyapunov_c(drift: *const RlDrift, out: *mut f64) -> RlStatus {
    guard(|| {
        let d = &drift.as_ref().ok_or_else(|| null("drift"))?.0;
        let out = output(out, d.dim() * d.dim(), "out")?;
        write_matrix(&check(lyapunov_c(d))?, out);
        Ok(())
    })
}

/// Counter-term `v = -½(MC - CM^T)`, written row-major.
///
/// # Safety
/// `drift` must be a live handle and `out` hold `dim * dim` values.
#[no_mangle]
pub unsafe extern "C" fn rl_renorm_v(drift: *const RlDrift, out: *mut f64) -> RlStatus {
    guard(|| {
        let d = &drift.as_ref().ok_or_else(|| null("drift"))?.0;
        let out = output(out, d.dim() * d.dim(), "out")?;
        write_matrix(check(renorm_v(d))?.matrix(), out);
        Ok(())
    })
}

/// Lead-lag counter-term in `R^{2d × 2d}` (row-major) and its scalar size.
///
/// # Safety
/// `out` must hold `4 d²` values; `v_scalar` may be null.
#[no_mangle]
pub unsafe extern "C" fn rl_leadlag_counter_term(
    hurst: f64,
    n: usize,
    d: usize,
    out: *mut f64,
    v_scalar: *mut f64,
) -> RlStatus {
    guard(|| {
        let r = check(leadlag_renorm(hurst, n, d))?;
        let out = output(out, 4 * d * d, "out")?;
        write_matrix(r.v_tilde.matrix(), out);
        if let Some(v) = v_scalar.as_mut() {
            *v = r.v_scalar;
        }
        Ok(())
    })
}

/// Second moment `ψ(n, K)` of a `K`-block of the off-diagonal quadratic variation.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_psi(n: usize, k: usize, hurst: f64, out: *mut f64) -> RlStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = check(psi_closed(n, k, hurst))?;
        Ok(())
    })
}

/// Sample `d` independent fBm components on `i T / n`, written as
/// `(n + 1) × d` row-major values starting at the origin.
///
/// # Safety
/// `out` must hold `(n + 1) * d` values.
#[no_mangle]
pub unsafe extern "C" fn rl_fbm_sample(
    seed: u64,
    hurst: f64,
    n: usize,
    d: usize,
    horizon: f64,
    method: RlFbmMethod,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        let spec = SamplerSpec {
            seed,
            method: match method {
                RlFbmMethod::Circulant => FbmMethod::Circulant,
                RlFbmMethod::Cholesky => FbmMethod::Cholesky,
            },
            hurst,
            n,
            d,
            horizon,
        };
        let sample = check(sample_fbm(&spec))?;
        let out = output(out, (n + 1) * d, "out")?;
        for (row, value) in out.chunks_mut(d).zip(sample.path.values()) {
            row.copy_from_slice(value);
        }
        Ok(())
    })
}
