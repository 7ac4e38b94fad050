//! C ABI for `sortsum`.
//!
//! Views are opaque heap handles created by `ss_view_from_array` or
//! `ss_view_from_fn` and released with `ss_view_free`. Every fallible call
//! returns an [`SsStatus`]; on failure `ss_last_error_message` describes the
//! error for the calling thread. Positions are 1-based.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sortsum::access::{Region, SortedAccess, SortedView};
use sortsum::error::Error;
use sortsum::oracle::{exact_sum, verify_region_certificate_sorted};
use sortsum::region::approximate_region;
use sortsum::sum::approximate_sum;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    OutOfRange = 3,
    /// Unsorted input, NaN, or a negative element where sums need `>= 0`.
    InputContract = 4,
    BudgetExceeded = 5,
    Internal = 6,
    Panic = 7,
}

/// Opaque list handle.
pub struct SsView {
    inner: SortedView,
}

/// `[lo, hi]`, or empty when `is_empty` is set (then `lo = hi = 0`).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SsRegion {
    pub lo: u64,
    pub hi: u64,
    pub is_empty: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsSumResult {
    pub estimate: f64,
    /// Number of regions peeled.
    pub cycles: u64,
    /// Queries made by this call.
    pub queries: u64,
    /// Internal region accuracy used.
    pub delta: f64,
}

/// Returns `X[index]` for `1 <= index <= len`; must be nondecreasing in
/// `index` and must not unwind.
pub type SsValueFn = Option<unsafe extern "C" fn(index: u64, user_data: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SsStatus {
    match err {
        Error::Parameter(_) | Error::MalformedCertificate(_) => SsStatus::InvalidParameter,
        Error::OutOfRange { .. } => SsStatus::OutOfRange,
        Error::InputContract { .. } => SsStatus::InputContract,
        Error::BudgetExceeded { .. } => SsStatus::BudgetExceeded,
        Error::Internal(_) => SsStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (SsStatus, String)>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside sortsum".into());
            SsStatus::Panic
        }
    }
}

fn lib(err: Error) -> (SsStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (SsStatus, String) {
    (SsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn view_mut<'a>(view: *mut SsView) -> Result<&'a mut SsView, (SsStatus, String)> {
    view.as_mut().ok_or_else(|| null("view"))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `len` values into a new view after checking they are
/// nondecreasing and free of NaN.
///
/// # Safety
/// `values` must point to `len` readable doubles (or be null when `len` is
/// 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_view_from_array(values: *const f64, len: u64, out: *mut *mut SsView) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let data = if len == 0 {
            Vec::new()
        } else {
            if values.is_null() {
                return Err(null("values"));
            }
            std::slice::from_raw_parts(values, len as usize).to_vec()
        };
        let inner = SortedView::validated(data).map_err(lib)?;
        *out = Box::into_raw(Box::new(SsView { inner }));
        Ok(())
    })
}

struct Callback {
    f: unsafe extern "C" fn(u64, *mut c_void) -> f64,
    user_data: *mut c_void,
}

// The caller guarantees the callback may run on any thread using the view.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

/// Creates a view over `callback(1..=len, user_data)` without storing the
/// values. Order is not checked.
///
/// # Safety
/// `callback` must be safe to call with `user_data` for the lifetime of the
/// view; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_view_from_fn(
    len: u64,
    callback: SsValueFn,
    user_data: *mut c_void,
    out: *mut *mut SsView,
) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = callback.ok_or_else(|| null("callback"))?;
        let cb = Callback { f, user_data };
        let inner = SortedView::from_fn(len, move |i| {
            let cb = &cb;
            unsafe { (cb.f)(i, cb.user_data) }
        });
        *out = Box::into_raw(Box::new(SsView { inner }));
        Ok(())
    })
}

/// Releases a view; null is ignored.
///
/// # Safety
/// `view` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ss_view_free(view: *mut SsView) {
    if !view.is_null() {
        drop(Box::from_raw(view));
    }
}

/// Length of the view, 0 for null.
///
/// # Safety
/// `view` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_view_len(view: *const SsView) -> u64 {
    view.as_ref().map_or(0, |v| v.inner.len())
}

/// Queries made through the view since creation or the last reset.
///
/// # Safety
/// `view` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_view_queries(view: *const SsView) -> u64 {
    view.as_ref().map_or(0, |v| v.inner.queries())
}

/// # Safety
/// `view` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_view_reset_queries(view: *mut SsView) {
    if let Some(v) = view.as_mut() {
        v.inner.reset_ledger();
    }
}

fn to_c(region: Region) -> SsRegion {
    match region.bounds() {
        Some((lo, hi)) => SsRegion { lo, hi, is_empty: false },
        None => SsRegion {
            lo: 0,
            hi: 0,
            is_empty: true,
        },
    }
}

fn from_c(region: &SsRegion) -> Region {
    if region.is_empty {
        Region::Empty
    } else {
        Region::Span {
            lo: region.lo,
            hi: region.hi,
        }
    }
}

/// `(1+delta)`-approximate `b`-region of `X[1..n]`.
///
/// # Safety
/// `view` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_approximate_region(
    view: *mut SsView,
    b: f64,
    delta: f64,
    n: u64,
    out: *mut SsRegion,
) -> SsStatus {
    guard(|| {
        let v = view_mut(view)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = to_c(approximate_region(&mut v.inner, b, delta, n).map_err(lib)?);
        Ok(())
    })
}

/// `(1+epsilon)`-approximate sum of `X[1..n]`.
///
/// # Safety
/// `view` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_approximate_sum(view: *mut SsView, epsilon: f64, n: u64, out: *mut SsSumResult) -> SsStatus {
    guard(|| {
        let v = view_mut(view)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let before = v.inner.queries();
        let r = approximate_sum(&mut v.inner, epsilon, n).map_err(lib)?;
        *out = SsSumResult {
            estimate: r.estimate,
            cycles: r.cycles,
            queries: v.inner.queries() - before,
            delta: r.delta,
        };
        Ok(())
    })
}

/// Exact `X[1] + ... + X[n]` with `n` queries.
///
/// # Safety
/// `view` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_exact_sum(view: *mut SsView, n: u64, out: *mut f64) -> SsStatus {
    guard(|| {
        let v = view_mut(view)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = exact_sum(&mut v.inner, n).map_err(lib)?;
        Ok(())
    })
}

/// Checks that `region` is a `(1+delta)`-approximate `b`-region of
/// `X[1..n]` in `O(log n)` queries; writes the verdict to `passed`.
///
/// # Safety
/// `view` must be a live handle, `region` readable and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_verify_region(
    view: *mut SsView,
    b: f64,
    delta: f64,
    region: *const SsRegion,
    n: u64,
    passed: *mut bool,
) -> SsStatus {
    guard(|| {
        let v = view_mut(view)?;
        let region = region.as_ref().ok_or_else(|| null("region"))?;
        let passed = passed.as_mut().ok_or_else(|| null("passed"))?;
        *passed = verify_region_certificate_sorted(&mut v.inner, b, delta, from_c(region), n)
            .map_err(lib)?
            .passed();
        Ok(())
    })
}
