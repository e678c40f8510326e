//! C ABI for the kernel library. Handles are opaque, every fallible call
//! returns an `AbkStatus` code, and the matching declarations live in
//! `include/abkernel.h` (kept in sync by `tests/header_sync.rs`).
//!
//! Conventions: branch is +1 or -1; axis is 0 (real) or 1 (imaginary);
//! complex results come back through out-pointers. On any nonzero status the
//! thread-local message from `abk_last_error_message` describes the failure.

use abkernel::propagator::{self, KernelConfig};
use abkernel::resolvent::{self, PolarPoint, SIntegralSpec};
use abkernel::specfun::{self, Axis, Branch};
use abkernel::{Error, FluxProfile};
use libc::{c_char, c_double, c_int};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

pub const ABK_OK: c_int = 0;
pub const ABK_ERR_INVALID: c_int = 2;
pub const ABK_ERR_NUMERICAL: c_int = 3;
pub const ABK_ERR_PANIC: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> c_int {
    match err.exit_code() {
        2 => ABK_ERR_INVALID,
        _ => ABK_ERR_NUMERICAL,
    }
}

fn guarded<F: FnOnce() -> c_int>(f: F) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            ABK_ERR_PANIC
        }
    }
}

/// Message describing the most recent failure on this thread. Valid until
/// the next failing call from the same thread.
#[no_mangle]
pub extern "C" fn abk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Evaluation context: flux profile plus numerical configuration.
pub struct AbkContext {
    flux: FluxProfile,
    kernel_cfg: KernelConfig,
    spec: SIntegralSpec,
}

/// Create a context from the flux profile JSON
/// `{"a0": 0.3, "harmonics": [[2, 0.1, 0.0]]}`. Returns null on error.
///
/// # Safety
/// `flux_json` must be a valid NUL-terminated C string.
#[no_mangle]
pub unsafe extern "C" fn abk_context_new(flux_json: *const c_char) -> *mut AbkContext {
    if flux_json.is_null() {
        set_error("flux_json is null");
        return std::ptr::null_mut();
    }
    let text = match CStr::from_ptr(flux_json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("flux_json is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match FluxProfile::from_json(text) {
        Ok(flux) => Box::into_raw(Box::new(AbkContext {
            flux,
            kernel_cfg: KernelConfig::default(),
            spec: SIntegralSpec::default(),
        })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Release a context created by `abk_context_new`. Null is ignored.
///
/// # Safety
/// `ctx` must be a pointer previously returned by `abk_context_new` and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn abk_context_free(ctx: *mut AbkContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Override the kernel tolerance of a context (default 1e-6).
///
/// # Safety
/// `ctx` must be a live pointer from `abk_context_new`.
#[no_mangle]
pub unsafe extern "C" fn abk_context_set_tol(ctx: *mut AbkContext, tol: c_double) -> c_int {
    if ctx.is_null() || !(tol > 0.0) {
        set_error("null context or non-positive tol");
        return ABK_ERR_INVALID;
    }
    (*ctx).kernel_cfg.tol = tol;
    (*ctx).spec.tol = (tol * 1e-2).min(1e-8);
    ABK_OK
}

/// J₀(x); total function, no error path.
#[no_mangle]
pub extern "C" fn abk_bessel_j0(x: c_double) -> c_double {
    specfun::bessel_j0(x)
}

#[no_mangle]
pub extern "C" fn abk_bessel_y0(x: c_double, out: *mut c_double) -> c_int {
    guarded(|| match specfun::bessel_y0(x) {
        Ok(v) => {
            unsafe { *out = v };
            ABK_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

#[no_mangle]
pub extern "C" fn abk_bessel_k0(x: c_double, out: *mut c_double) -> c_int {
    guarded(|| match specfun::bessel_k0(x) {
        Ok(v) => {
            unsafe { *out = v };
            ABK_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

fn branch_of(branch: c_int) -> Result<Branch, ()> {
    match branch {
        1 => Ok(Branch::Plus),
        -1 => Ok(Branch::Minus),
        _ => Err(()),
    }
}

/// H₀^±(ρ) on the real (axis = 0) or imaginary (axis = 1) ray.
#[no_mangle]
pub extern "C" fn abk_hankel0(
    branch: c_int,
    axis: c_int,
    rho: c_double,
    out_re: *mut c_double,
    out_im: *mut c_double,
) -> c_int {
    guarded(|| {
        let b = match branch_of(branch) {
            Ok(b) => b,
            Err(()) => {
                set_error("branch must be +1 or -1");
                return ABK_ERR_INVALID;
            }
        };
        let ax = match axis {
            0 => Axis::Real,
            1 => Axis::Imaginary,
            _ => {
                set_error("axis must be 0 (real) or 1 (imaginary)");
                return ABK_ERR_INVALID;
            }
        };
        match specfun::hankel0(b, ax, rho) {
            Ok(v) => {
                unsafe {
                    *out_re = v.re;
                    *out_im = v.im;
                }
                ABK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// F^±(ρ) = H₀^±(ρ) − H₀^±(iρ).
#[no_mangle]
pub extern "C" fn abk_f_pm(
    branch: c_int,
    rho: c_double,
    out_re: *mut c_double,
    out_im: *mut c_double,
) -> c_int {
    guarded(|| {
        let b = match branch_of(branch) {
            Ok(b) => b,
            Err(()) => {
                set_error("branch must be +1 or -1");
                return ABK_ERR_INVALID;
            }
        };
        match specfun::f_pm(b, rho) {
            Ok(v) => {
                unsafe {
                    *out_re = v.re;
                    *out_im = v.im;
                }
                ABK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Resolvent kernel of order 2 or 4 at spectral parameter λ.
///
/// # Safety
/// `ctx` must be a live pointer from `abk_context_new`; out-pointers must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn abk_resolvent(
    ctx: *const AbkContext,
    order: c_int,
    branch: c_int,
    lambda: c_double,
    rx: c_double,
    theta_x: c_double,
    ry: c_double,
    theta_y: c_double,
    out_re: *mut c_double,
    out_im: *mut c_double,
) -> c_int {
    guarded(|| {
        if ctx.is_null() {
            set_error("null context");
            return ABK_ERR_INVALID;
        }
        let ctx = &*ctx;
        let b = match branch_of(branch) {
            Ok(b) => b,
            Err(()) => {
                set_error("branch must be +1 or -1");
                return ABK_ERR_INVALID;
            }
        };
        let run = || -> Result<num_complex::Complex64, Error> {
            let x = PolarPoint::new(rx, theta_x)?;
            let y = PolarPoint::new(ry, theta_y)?;
            match order {
                2 => resolvent::resolvent2(b, &ctx.flux, lambda, &x, &y, &ctx.spec),
                4 => resolvent::resolvent4(b, &ctx.flux, lambda, &x, &y, &ctx.spec),
                _ => Err(Error::InvalidConfig("order must be 2 or 4".into())),
            }
        };
        match run() {
            Ok(v) => {
                *out_re = v.re;
                *out_im = v.im;
                ABK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Propagator kernel e^{-itL}(x, y); also writes the truncation estimate.
///
/// # Safety
/// `ctx` must be a live pointer from `abk_context_new`; out-pointers must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn abk_kernel(
    ctx: *const AbkContext,
    t: c_double,
    rx: c_double,
    theta_x: c_double,
    ry: c_double,
    theta_y: c_double,
    out_re: *mut c_double,
    out_im: *mut c_double,
    out_trunc_err: *mut c_double,
) -> c_int {
    guarded(|| {
        if ctx.is_null() {
            set_error("null context");
            return ABK_ERR_INVALID;
        }
        let ctx = &*ctx;
        let run = || -> Result<propagator::KernelResult, Error> {
            let x = PolarPoint::new(rx, theta_x)?;
            let y = PolarPoint::new(ry, theta_y)?;
            propagator::kernel(t, &x, &y, &ctx.flux, &ctx.kernel_cfg)
        };
        match run() {
            Ok(k) => {
                *out_re = k.value.re;
                *out_im = k.value.im;
                if !out_trunc_err.is_null() {
                    *out_trunc_err = k.trunc_err;
                }
                ABK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Free bilaplacian kernel at separation r ≥ 0.
#[no_mangle]
pub extern "C" fn abk_free_kernel(
    t: c_double,
    r: c_double,
    out_re: *mut c_double,
    out_im: *mut c_double,
) -> c_int {
    guarded(|| {
        match propagator::free_kernel(t, r, &KernelConfig::default()) {
            Ok(v) => {
                unsafe {
                    *out_re = v.re;
                    *out_im = v.im;
                }
                ABK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
