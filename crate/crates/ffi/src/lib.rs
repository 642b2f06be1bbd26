//! C interface to `gheat`.
//!
//! Every entry point returns a [`GheatStatus`] and writes its result through an
//! out-pointer. On failure a human-readable message is kept per thread and can
//! be read with [`gheat_last_error`]. Panics never cross the boundary; they are
//! reported as [`GheatStatus::Panic`].
//!
//! Profiles are opaque: create with [`gheat_profile_new`], release with
//! [`gheat_profile_free`]. A profile is immutable, so one handle may be shared
//! between threads.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use gheat::free_boundary::{solve_free_boundary, solve_free_boundary_degenerate, FreeBoundary};
use gheat::solution::{finance_log_moment, g_expectation_monomial, odd_moment, Profile};
use gheat::{gaussian, hermite, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GheatStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Range = 3,
    NoBracket = 4,
    NoConvergence = 5,
    IdentityViolation = 6,
    NonFinite = 7,
    Panic = 8,
}

impl From<&Error> for GheatStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => GheatStatus::Domain,
            Error::Range(_) => GheatStatus::Range,
            Error::Bracket { .. } => GheatStatus::NoBracket,
            Error::Convergence { .. } => GheatStatus::NoConvergence,
            Error::IdentityViolation(_) => GheatStatus::IdentityViolation,
            Error::NonFinite { .. } => GheatStatus::NonFinite,
        }
    }
}

/// Solved free boundary. `d_scaled` is NaN when `sigma == 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GheatFreeBoundary {
    pub n: u32,
    pub sigma: f64,
    pub c: f64,
    pub k: f64,
    pub d_scaled: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl From<FreeBoundary> for GheatFreeBoundary {
    fn from(fb: FreeBoundary) -> Self {
        GheatFreeBoundary {
            n: fb.n,
            sigma: fb.sigma,
            c: fb.c,
            k: fb.k,
            d_scaled: fb.d_scaled.unwrap_or(f64::NAN),
            residual: fb.residual,
            iterations: fb.iterations,
        }
    }
}

/// Opaque handle to an immutable profile.
pub struct GheatProfile(Profile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("interior NULs removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

/// Runs `f`, storing its value in `out`. Errors and panics become status codes.
fn guarded<T, F>(out: *mut T, f: F) -> GheatStatus
where
    F: FnOnce() -> gheat::Result<T> + UnwindSafe,
{
    if out.is_null() {
        set_last_error("output pointer is null".into());
        return GheatStatus::NullPointer;
    }
    match catch_unwind(f) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller guarantees it is writable.
            unsafe { out.write(v) };
            GheatStatus::Ok
        }
        Ok(Err(e)) => {
            let status = GheatStatus::from(&e);
            set_last_error(e.to_string());
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            GheatStatus::Panic
        }
    }
}

/// Message of the most recent failure on the calling thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gheat_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gheat_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// `∫_x^∞ e^{-t²/2} dt`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gheat_gaussian_tail(x: f64, out: *mut f64) -> GheatStatus {
    guarded(out, || gaussian::gaussian_tail(x))
}

/// `e^{x²/2} ∫_x^∞ e^{-t²/2} dt`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gheat_scaled_tail(x: f64, out: *mut f64) -> GheatStatus {
    guarded(out, || gaussian::scaled_tail(x))
}

/// `m_n(x) = ∫_x^∞ (s - x)^{2n+1} e^{-s²/2} ds`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gheat_m_fn(n: u32, x: f64, out: *mut f64) -> GheatStatus {
    guarded(out, || hermite::m_fn(n, x))
}

/// Checks the exact polynomial identities of order `n`; `*holds` is set to
/// true or false. A violated identity is not an error.
///
/// # Safety
/// `holds` must be NULL or valid for writing one `bool`.
#[no_mangle]
pub unsafe extern "C" fn gheat_pair_identities(n: u32, holds: *mut bool) -> GheatStatus {
    guarded(holds, || hermite::pair_identities(n).map(|r| r.holds()))
}

/// Solves for the free boundary of order `n` at volatility floor `sigma` in
/// `[0, 1)`; `tol` bounds the matching residual at the returned root.
///
/// # Safety
/// `out` must be NULL or valid for writing one `GheatFreeBoundary`.
#[no_mangle]
pub unsafe extern "C" fn gheat_free_boundary_solve(
    n: u32,
    sigma: f64,
    tol: f64,
    out: *mut GheatFreeBoundary,
) -> GheatStatus {
    guarded(out, || {
        let fb = if sigma == 0.0 {
            solve_free_boundary_degenerate(n, tol)
        } else {
            solve_free_boundary(n, sigma, tol)
        };
        fb.map(Into::into)
    })
}

/// Builds the profile of order `n` for `sigma` in `[0, 1]`.
///
/// # Safety
/// `out` must be NULL or valid for writing one pointer. On success the handle
/// must eventually be passed to `gheat_profile_free`.
#[no_mangle]
pub unsafe extern "C" fn gheat_profile_new(
    n: u32,
    sigma: f64,
    out: *mut *mut GheatProfile,
) -> GheatStatus {
    guarded(out, || {
        Profile::new(n, sigma).map(|p| Box::into_raw(Box::new(GheatProfile(p))))
    })
}

/// Releases a profile. NULL is ignored.
///
/// # Safety
/// `profile` must be NULL or a handle from `gheat_profile_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gheat_profile_free(profile: *mut GheatProfile) {
    if !profile.is_null() {
        // SAFETY: ownership returns from the caller, per the contract above.
        drop(unsafe { Box::from_raw(profile) });
    }
}

unsafe fn profile_ref<'a>(profile: *const GheatProfile) -> Option<&'a Profile> {
    // SAFETY: forwarded from the public entry points' contracts.
    unsafe { profile.as_ref() }.map(|p| &p.0)
}

fn null_handle() -> GheatStatus {
    set_last_error("profile handle is null".into());
    GheatStatus::NullPointer
}

/// `P`, `P'` or `P''` (for `order` 0, 1, 2) at `x`.
///
/// # Safety
/// `profile` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gheat_profile_eval(
    profile: *const GheatProfile,
    x: f64,
    order: u8,
    out: *mut f64,
) -> GheatStatus {
    match unsafe { profile_ref(profile) } {
        Some(p) => guarded(out, || p.eval(x, order)),
        None => null_handle(),
    }
}

/// Solution `u(t, x)` with initial value `x^{2n+1}`.
///
/// # Safety
/// `profile` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gheat_profile_solution(
    profile: *const GheatProfile,
    t: f64,
    x: f64,
    out: *mut f64,
) -> GheatStatus {
    match unsafe { profile_ref(profile) } {
        Some(p) => guarded(out, || p.solution(t, x)),
        None => null_handle(),
    }
}

/// Free boundary abscissa of the profile. Fails with `Domain` for `sigma == 1`,
/// where there is none.
///
/// # Safety
/// `profile` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gheat_profile_boundary(
    profile: *const GheatProfile,
    out: *mut f64,
) -> GheatStatus {
    match unsafe { profile_ref(profile) } {
        Some(p) => guarded(out, || {
            p.boundary()
                .ok_or_else(|| Error::Domain("the classical profile has no free boundary".into()))
        }),
        None => null_handle(),
    }
}

/// Sublinear expectation of `B_t^{2n+1}`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gheat_odd_moment(
    n: u32,
    sigma: f64,
    t: f64,
    out: *mut f64,
) -> GheatStatus {
    guarded(out, || odd_moment(n, sigma, t))
}

/// Sublinear expectation of `(x + B_t)^m` for any power `m ≥ 1`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gheat_monomial_expectation(
    m: u32,
    sigma: f64,
    t: f64,
    x: f64,
    out: *mut f64,
) -> GheatStatus {
    guarded(out, || g_expectation_monomial(m, sigma, t, x))
}

/// Worst-case `E[(log S_T)^m]` for `d log S = mu dt + sigma_t dB` with
/// `sigma_t` in `[sigma, 1]`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gheat_finance_log_moment(
    m: u32,
    sigma: f64,
    mu: f64,
    horizon: f64,
    out: *mut f64,
) -> GheatStatus {
    guarded(out, || finance_log_moment(m, sigma, mu, horizon))
}
