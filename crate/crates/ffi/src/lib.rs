//! C ABI over `calabi-core`.
//!
//! Solutions live behind opaque handles that the caller frees. Every function
//! returns a [`CalabiStatus`]; on failure the message is kept per thread and
//! can be read back with [`calabi_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use calabi_core::futaki::{cone_angle_line, logbf_conical, logbf_extremal_closed_form};
use calabi_core::invariants::chern_integral;
use calabi_core::params::ProblemSpec;
use calabi_core::profile::{profile_from_trajectory, smooth_profile, MomentumProfile};
use calabi_core::quadrature::QuadratureConfig;
use calabi_core::shooting::{locate_breakdown_boundary, solve_conical, solve_smooth, SmoothSolveReport, SolveReport};
use calabi_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalabiStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Integration = 3,
    Solver = 4,
    Profile = 5,
    Quadrature = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Other = 9,
}

/// Solved conical problem with its momentum profile.
pub struct CalabiConical {
    solve: SolveReport,
    profile: MomentumProfile,
}

/// Solved smooth problem with its momentum profile.
pub struct CalabiSmooth {
    solve: SmoothSolveReport,
    profile: MomentumProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CalabiStatus {
    match e {
        Error::Domain(_) => CalabiStatus::Domain,
        Error::Integration { .. } => CalabiStatus::Integration,
        Error::Solver { .. } => CalabiStatus::Solver,
        Error::Profile(_) => CalabiStatus::Profile,
        Error::Quadrature(_) => CalabiStatus::Quadrature,
        _ => CalabiStatus::Other,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (CalabiStatus, String)>) -> CalabiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CalabiStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside calabi".into());
            CalabiStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (CalabiStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (CalabiStatus, String) {
    (CalabiStatus::NullPointer, format!("{name} is null"))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (CalabiStatus, String)> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (CalabiStatus, String)> {
    p.as_ref().ok_or_else(|| null("handle"))
}

/// Copies `src` into `dst` when `dst` is non-null.
unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), (CalabiStatus, String)> {
    if dst.is_null() {
        return Ok(());
    }
    if len < src.len() {
        return Err((CalabiStatus::BufferTooSmall, format!("buffer holds {len}, need {}", src.len())));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn calabi_last_error_message(buf: *mut c_char, len: usize) -> usize {
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

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn calabi_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Forcing constants `B`, `C` for the shooting parameter `alpha`.
///
/// # Safety
/// `b` and `c` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_coeffs(m: f64, beta0: f64, alpha: f64, b: *mut f64, c: *mut f64) -> CalabiStatus {
    guard(|| {
        let (b, c) = (out(b, "b")?, out(c, "c")?);
        let spec = ProblemSpec::from_alpha(m, beta0, alpha).map_err(core_err)?;
        let coeffs = spec.coeffs();
        *b = coeffs.b;
        *c = coeffs.c;
        Ok(())
    })
}

/// Solves the conical problem; on success `*result` owns a new handle.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_solve_conical(
    m: f64,
    beta0: f64,
    tol: f64,
    result: *mut *mut CalabiConical,
) -> CalabiStatus {
    guard(|| {
        let result = out(result, "result")?;
        *result = std::ptr::null_mut();
        let solve = solve_conical(m, beta0, tol).map_err(core_err)?;
        let profile = profile_from_trajectory(&solve.trajectory, &solve.coeffs).map_err(core_err)?;
        *result = Box::into_raw(Box::new(CalabiConical { solve, profile }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`calabi_solve_conical`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_free(h: *mut CalabiConical) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_alpha(h: *const CalabiConical, value: *mut f64) -> CalabiStatus {
    guard(|| {
        *out(value, "value")? = handle(h)?.solve.spec.alpha;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_beta_inf(h: *const CalabiConical, value: *mut f64) -> CalabiStatus {
    guard(|| {
        *out(value, "value")? = handle(h)?.solve.beta_inf;
        Ok(())
    })
}

/// Signed boundary residual `v(m+1) − 2(m+1)²`.
///
/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_residual(h: *const CalabiConical, value: *mut f64) -> CalabiStatus {
    guard(|| {
        *out(value, "value")? = handle(h)?.solve.residual;
        Ok(())
    })
}

/// Number of profile samples, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_profile_len(h: *const CalabiConical) -> usize {
    h.as_ref().map_or(0, |h| h.profile.grid.len())
}

/// Copies the sample abscissae and `φ`, `φ'` into caller buffers of length
/// `len`. Any buffer may be null to skip it.
///
/// # Safety
/// `h` must be a live handle; non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_copy_profile(
    h: *const CalabiConical,
    gamma: *mut f64,
    phi: *mut f64,
    dphi: *mut f64,
    len: usize,
) -> CalabiStatus {
    guard(|| {
        let p = &handle(h)?.profile;
        copy_out(&p.grid, gamma, len)?;
        copy_out(&p.phi, phi, len)?;
        copy_out(&p.dphi, dphi, len)
    })
}

/// Total Chern integral, `−4` for a solution.
///
/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_chern_integral(h: *const CalabiConical, value: *mut f64) -> CalabiStatus {
    guard(|| {
        let value = out(value, "value")?;
        *value = chern_integral(&handle(h)?.profile, &QuadratureConfig::default()).total;
        Ok(())
    })
}

/// Log Futaki invariant of the solution, zero up to quadrature error.
///
/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_conical_logbf(h: *const CalabiConical, value: *mut f64) -> CalabiStatus {
    guard(|| {
        let value = out(value, "value")?;
        let h = handle(h)?;
        let spec = h.solve.spec;
        let f = logbf_conical(spec.m, spec.beta0, h.solve.beta_inf, &h.profile, &QuadratureConfig::default())
            .map_err(core_err)?;
        *value = f.value;
        Ok(())
    })
}

/// Solves the smooth problem; on success `*result` owns a new handle.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_solve_smooth(m: f64, tol: f64, result: *mut *mut CalabiSmooth) -> CalabiStatus {
    guard(|| {
        let result = out(result, "result")?;
        *result = std::ptr::null_mut();
        let solve = solve_smooth(m, tol).map_err(core_err)?;
        let profile = smooth_profile(&solve.trajectory).map_err(core_err)?;
        *result = Box::into_raw(Box::new(CalabiSmooth { solve, profile }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`calabi_solve_smooth`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn calabi_smooth_free(h: *mut CalabiSmooth) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// The shooting constant `C(m)`.
///
/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_smooth_c_star(h: *const CalabiSmooth, value: *mut f64) -> CalabiStatus {
    guard(|| {
        *out(value, "value")? = handle(h)?.solve.c_star;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_smooth_residual(h: *const CalabiSmooth, value: *mut f64) -> CalabiStatus {
    guard(|| {
        *out(value, "value")? = handle(h)?.solve.residual;
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn calabi_smooth_profile_len(h: *const CalabiSmooth) -> usize {
    h.as_ref().map_or(0, |h| h.profile.grid.len())
}

/// Same layout as [`calabi_conical_copy_profile`].
///
/// # Safety
/// `h` must be a live handle; non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn calabi_smooth_copy_profile(
    h: *const CalabiSmooth,
    gamma: *mut f64,
    phi: *mut f64,
    dphi: *mut f64,
    len: usize,
) -> CalabiStatus {
    guard(|| {
        let p = &handle(h)?.profile;
        copy_out(&p.grid, gamma, len)?;
        copy_out(&p.phi, phi, len)?;
        copy_out(&p.dphi, dphi, len)
    })
}

/// Closed-form log Futaki invariant of the smooth extremal metric with cone
/// angles `beta0`, `beta_inf`.
///
/// # Safety
/// `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_logbf_extremal_closed_form(
    m: f64,
    c_star: f64,
    beta0: f64,
    beta_inf: f64,
    value: *mut f64,
) -> CalabiStatus {
    guard(|| {
        *out(value, "value")? = logbf_extremal_closed_form(m, c_star, beta0, beta_inf).value;
        Ok(())
    })
}

/// Cone-angle line `coef_beta_inf·β∞ + coef_beta0·β₀ = rhs`.
///
/// # Safety
/// All three outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_cone_angle_line(
    m: f64,
    c_star: f64,
    coef_beta_inf: *mut f64,
    coef_beta0: *mut f64,
    rhs: *mut f64,
) -> CalabiStatus {
    guard(|| {
        let (a, b, r) = (out(coef_beta_inf, "coef_beta_inf")?, out(coef_beta0, "coef_beta0")?, out(rhs, "rhs")?);
        if !(m > 0.0 && m.is_finite() && c_star.is_finite()) {
            return Err((CalabiStatus::Domain, format!("need finite m > 0 and C, got m = {m}, C = {c_star}")));
        }
        let line = cone_angle_line(m, c_star);
        *a = line.coef_beta_inf;
        *b = line.coef_beta0;
        *r = line.rhs;
        Ok(())
    })
}

/// Left end of the surviving shooting interval, to width `tol`.
///
/// # Safety
/// `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn calabi_breakdown_boundary(m: f64, beta0: f64, tol: f64, value: *mut f64) -> CalabiStatus {
    guard(|| {
        let value = out(value, "value")?;
        *value = locate_breakdown_boundary(m, beta0, tol).map_err(core_err)?;
        Ok(())
    })
}
