//! C interface to `shimura_vol`.
//!
//! Handles are opaque and owned by the caller: every `*_new`/`*_parse` has a
//! matching `*_free`, and every `char **out` string must be released with
//! [`shv_string_free`]. Functions return a [`ShvStatus`]; on failure the
//! message is available from [`shv_last_error`] on the same thread.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use shimura_vol::borcherds::{borcherds_weight, weight_cross_check, BorcherdsInput};
use shimura_vol::dirichlet::make_field;
use shimura_vol::eisenstein::{coeff_b, CoeffRequest};
use shimura_vol::report::real_string;
use shimura_vol::spaces::SpaceSpec;
use shimura_vol::volume::{a_v_exact0, vol_c_hodge_mw, volume_report};
use shimura_vol::{Context, Error};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    /// The input violates a mathematical constraint (bad discriminant,
    /// invariant product, prime, dimension).
    InputError = 3,
    /// Precision loss, quadrature failure or a non-integral inversion.
    NumericalError = 4,
    /// The two weight routes disagree.
    CrossCheckFailed = 5,
    Panic = 6,
}

/// Working precision.
pub struct ShvContext {
    ctx: Context,
}

/// A validated hermitian space.
pub struct ShvSpace {
    spec: SpaceSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: ShvStatus, msg: &str) -> ShvStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> ShvStatus {
    let status = if e.is_numerical() {
        ShvStatus::NumericalError
    } else {
        ShvStatus::InputError
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> ShvStatus) -> ShvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(ShvStatus::Panic, &msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ShvStatus> {
    if s.is_null() {
        return Err(fail(ShvStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ShvStatus::InvalidString, "string is not UTF-8"))
}

unsafe fn write_str(out: *mut *mut c_char, s: String) -> ShvStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            ShvStatus::Ok
        }
        Err(_) => fail(ShvStatus::InvalidString, "output contains NUL"),
    }
}

/// Message of the last failure on this thread. Owned by the library and
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn shv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned through a `char **out` argument.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn shv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Context with `digits` decimal digits; `NULL` if `digits < 30`.
#[no_mangle]
pub extern "C" fn shv_context_new(digits: u32) -> *mut ShvContext {
    if digits < 30 {
        set_error("digits must be at least 30");
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(ShvContext {
        ctx: Context::new(digits),
    }))
}

/// # Safety
/// `ctx` must come from [`shv_context_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn shv_context_free(ctx: *mut ShvContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Class number `h` and unit count `w` of `Q(sqrt(-D))`.
///
/// # Safety
/// `h` and `w` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_field_class_number(d: i64, h: *mut u64, w: *mut u32) -> ShvStatus {
    if h.is_null() || w.is_null() {
        return fail(ShvStatus::NullPointer, "null output");
    }
    guard(|| match make_field(d) {
        Ok(f) => {
            *h = f.h.numer().to_u64().unwrap_or(0);
            *w = f.w;
            ShvStatus::Ok
        }
        Err(e) => from_core(e),
    })
}

/// Parses a spec string `D=<int>;n=<int>;inv=<p:+-1,...>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_space_parse(spec: *const c_char, out: *mut *mut ShvSpace) -> ShvStatus {
    if out.is_null() {
        return fail(ShvStatus::NullPointer, "null output");
    }
    let s = match read_str(spec) {
        Ok(s) => s,
        Err(st) => return st,
    };
    guard(|| match s.parse::<SpaceSpec>() {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(ShvSpace { spec }));
            ShvStatus::Ok
        }
        Err(e) => from_core(e),
    })
}

/// Builds a space from `D`, `n` and `len` pairs `(primes[i], invs[i])`.
///
/// # Safety
/// `primes` and `invs` must hold `len` entries (may be NULL when `len` is 0);
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_space_new(
    d: i64,
    n: u32,
    primes: *const u64,
    invs: *const i32,
    len: usize,
    out: *mut *mut ShvSpace,
) -> ShvStatus {
    if out.is_null() || (len > 0 && (primes.is_null() || invs.is_null())) {
        return fail(ShvStatus::NullPointer, "null argument");
    }
    let pairs: Vec<(u64, i32)> = if len == 0 {
        Vec::new()
    } else {
        let p = std::slice::from_raw_parts(primes, len);
        let v = std::slice::from_raw_parts(invs, len);
        p.iter().copied().zip(v.iter().copied()).collect()
    };
    guard(|| match SpaceSpec::from_parts(d, n, &pairs) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(ShvSpace { spec }));
            ShvStatus::Ok
        }
        Err(e) => from_core(e),
    })
}

/// # Safety
/// `space` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn shv_space_free(space: *mut ShvSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Complex volume of the Hodge bundle as an exact `"p/q"` string.
///
/// # Safety
/// `space` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_volume_hodge(space: *const ShvSpace, out: *mut *mut c_char) -> ShvStatus {
    if space.is_null() || out.is_null() {
        return fail(ShvStatus::NullPointer, "null argument");
    }
    let spec = &(*space).spec;
    guard(|| write_str(out, vol_c_hodge_mw(spec, &a_v_exact0(spec)).to_string()))
}

/// Full volume report as JSON, without exceptional components.
///
/// # Safety
/// `ctx` and `space` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_volume_json(
    ctx: *const ShvContext,
    space: *const ShvSpace,
    out: *mut *mut c_char,
) -> ShvStatus {
    if ctx.is_null() || space.is_null() || out.is_null() {
        return fail(ShvStatus::NullPointer, "null argument");
    }
    let (ctx, spec) = (&(*ctx).ctx, &(*space).spec);
    guard(|| match volume_report(ctx, spec, &[]) {
        Ok(r) => write_str(out, serde_json::to_string(&r).expect("report serializes")),
        Err(e) => from_core(e),
    })
}

/// `B(m, 0, s0)` as an exact `"p/q"` string and its `s`-derivative as a
/// decimal string.
///
/// # Safety
/// `ctx` and `space` must be live handles; `value` and `derivative` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_coeff_b(
    ctx: *const ShvContext,
    space: *const ShvSpace,
    m: u64,
    value: *mut *mut c_char,
    derivative: *mut *mut c_char,
) -> ShvStatus {
    if ctx.is_null() || space.is_null() || value.is_null() || derivative.is_null() {
        return fail(ShvStatus::NullPointer, "null argument");
    }
    let req = CoeffRequest {
        spec: (*space).spec.clone(),
        m,
    };
    let ctx = &(*ctx).ctx;
    guard(|| match coeff_b(ctx, &req) {
        Ok(c) => {
            let st = write_str(value, c.value.to_string());
            if st != ShvStatus::Ok {
                return st;
            }
            let st = write_str(derivative, real_string(&c.jet.der));
            if st != ShvStatus::Ok {
                shv_string_free(*value);
                *value = ptr::null_mut();
            }
            st
        }
        Err(e) => from_core(e),
    })
}

/// Borcherds weight for principal-part coefficients `c(-primes[i]) = coeffs[i]`,
/// as an exact `"p/q"` string. When `ctx` is non-NULL the constant-term route
/// is evaluated as well and must reconstruct the same rational.
///
/// # Safety
/// `space` must be a live handle, `ctx` a live handle or NULL; `primes` and
/// `coeffs` must hold `len` entries; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn shv_borcherds_weight(
    ctx: *const ShvContext,
    space: *const ShvSpace,
    primes: *const u64,
    coeffs: *const i64,
    len: usize,
    out: *mut *mut c_char,
) -> ShvStatus {
    if space.is_null() || out.is_null() || (len > 0 && (primes.is_null() || coeffs.is_null())) {
        return fail(ShvStatus::NullPointer, "null argument");
    }
    let mut map = BTreeMap::new();
    if len > 0 {
        let p = std::slice::from_raw_parts(primes, len);
        let c = std::slice::from_raw_parts(coeffs, len);
        for (&p, &c) in p.iter().zip(c) {
            *map.entry(p).or_insert(0) += c;
        }
    }
    let spec = (*space).spec.clone();
    let ctx = ctx.as_ref().map(|c| &c.ctx);
    guard(|| {
        let input = match BorcherdsInput::new(spec, map) {
            Ok(i) => i,
            Err(e) => return from_core(e),
        };
        let k = match borcherds_weight(&input) {
            Ok(k) => k,
            Err(e) => return from_core(e),
        };
        if let Some(ctx) = ctx {
            match weight_cross_check(ctx, &input) {
                Ok(q) if q == k => {}
                Ok(q) => return fail(ShvStatus::CrossCheckFailed, &format!("routes disagree: {k} vs {q}")),
                Err(e) => return from_core(e),
            }
        }
        write_str(out, k.to_string())
    })
}
