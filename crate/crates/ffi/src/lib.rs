//! C ABI over the ksplit library.
//!
//! Records cross the boundary as opaque `KsRecord` handles; everything else
//! as UTF-8 JSON. Every function returns a `KsStatus` whose first values
//! match the CLI exit codes, and on failure leaves a message for
//! `ks_last_error`. Strings returned through `char **` must be released with
//! `ks_string_free`, handles with `ks_record_free`.
//!
//! Callers pass nul-terminated strings, live handles and writable output
//! pointers; null is detected and reported as `KS_STATUS_NULL_POINTER`,
//! anything else invalid is undefined behaviour.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use ksplit::calculus::{common_stabilization, connect_sum, dehn_twist, k_stabilize, KSplittingRecord};
use ksplit::geom::{make_tube_surface, CurveOnSurface, Point3, PolyCurve3};
use ksplit::io::{parse_json, to_json, KnotCurveFile, SurfaceFile};
use ksplit::linking::slope::{default_epsilon, linking_number};
use ksplit::linking::surface_slope_with;
use ksplit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsStatus {
    Ok = 0,
    InputError = 1,
    NumericalError = 2,
    SlopeMismatch = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Opaque handle to a K-splitting record.
pub struct KsRecord {
    inner: KSplittingRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KsStatus {
    match e.exit_code() {
        3 => KsStatus::SlopeMismatch,
        2 => KsStatus::NumericalError,
        _ => KsStatus::InputError,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type Outcome = Result<(), Fail>;

fn guard(f: impl FnOnce() -> Outcome) -> KsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KsStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            KsStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            KsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail::Lib(Error::Input(format!("{what} is not UTF-8: {e}"))))
}

unsafe fn record_arg<'a>(p: *const KsRecord, what: &'static str) -> Result<&'a KSplittingRecord, Fail> {
    p.as_ref().map(|r| &r.inner).ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Outcome {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

fn new_record(r: KSplittingRecord) -> *mut KsRecord {
    Box::into_raw(Box::new(KsRecord { inner: r }))
}

fn new_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

unsafe fn points(xyz: *const f64, n: usize, what: &'static str) -> Result<PolyCurve3, Fail> {
    if xyz.is_null() {
        return Err(Fail::Null(what));
    }
    let flat = std::slice::from_raw_parts(xyz, 3 * n);
    let pts = flat.chunks_exact(3).map(|c| Point3::new(c[0], c[1], c[2])).collect();
    Ok(PolyCurve3::closed(pts)?)
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ks_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn ks_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ks_record_free(r: *mut KsRecord) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Parses and validates a record.
#[no_mangle]
pub unsafe extern "C" fn ks_record_from_json(json: *const c_char, out: *mut *mut KsRecord) -> KsStatus {
    guard(|| {
        let r: KSplittingRecord = parse_json(str_arg(json, "json")?, "record")?;
        put(out, new_record(r), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ks_record_to_json(r: *const KsRecord, out: *mut *mut c_char) -> KsStatus {
    guard(|| {
        let r = record_arg(r, "record")?;
        put(out, new_string(to_json(r)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ks_record_genus(r: *const KsRecord, out: *mut u32) -> KsStatus {
    guard(|| put(out, record_arg(r, "record")?.genus(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn ks_record_slope(r: *const KsRecord, out: *mut i64) -> KsStatus {
    guard(|| put(out, record_arg(r, "record")?.slope(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn ks_k_stabilize(r: *const KsRecord, out: *mut *mut KsRecord) -> KsStatus {
    guard(|| {
        let s = k_stabilize(record_arg(r, "record")?)?;
        put(out, new_record(s), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ks_dehn_twist(r: *const KsRecord, k: i64, out: *mut *mut KsRecord) -> KsStatus {
    guard(|| {
        let s = dehn_twist(record_arg(r, "record")?, k)?;
        put(out, new_record(s), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ks_connect_sum(a: *const KsRecord, b: *const KsRecord, out: *mut *mut KsRecord) -> KsStatus {
    guard(|| {
        let s = connect_sum(record_arg(a, "a")?, record_arg(b, "b")?)?;
        put(out, new_record(s), "out")
    })
}

/// Common K-stabilization. `traces_json`, if not null, receives
/// `{"trace_a": ..., "trace_b": ...}`. Unequal slopes give
/// `KS_STATUS_SLOPE_MISMATCH`.
#[no_mangle]
pub unsafe extern "C" fn ks_common_stabilization(
    a: *const KsRecord,
    b: *const KsRecord,
    extra_stabs: u32,
    out: *mut *mut KsRecord,
    traces_json: *mut *mut c_char,
) -> KsStatus {
    guard(|| {
        let (r, ta, tb) = common_stabilization(record_arg(a, "a")?, record_arg(b, "b")?, extra_stabs)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        if !traces_json.is_null() {
            let text = format!("{{\"trace_a\": {}, \"trace_b\": {}}}", to_json(&ta), to_json(&tb));
            traces_json.write(new_string(text));
        }
        put(out, new_record(r), "out")
    })
}

/// Surface slope of a chart curve. `surface_json` is a graph file with
/// optional `"tube"` settings, `curve_json` a chart curve. A non-positive
/// `epsilon` selects the default pushoff distance.
#[no_mangle]
pub unsafe extern "C" fn ks_surface_slope(
    surface_json: *const c_char,
    curve_json: *const c_char,
    epsilon: f64,
    seed: u64,
    out: *mut i64,
) -> KsStatus {
    guard(|| {
        let file: SurfaceFile = parse_json(str_arg(surface_json, "surface_json")?, "surface")?;
        let curve: KnotCurveFile = parse_json(str_arg(curve_json, "curve_json")?, "curve")?;
        let host = Arc::new(make_tube_surface(&file.graph, &file.tube.options())?);
        let c = CurveOnSurface::from_spec(&host, &curve.curve)?;
        let eps = if epsilon > 0.0 { epsilon } else { default_epsilon(&c) };
        put(out, surface_slope_with(&c, eps, seed)?.slope, "out")
    })
}

/// Linking number of two closed polygons of `n1` and `n2` vertices, given
/// as packed `x, y, z` triples. Both engines must agree.
#[no_mangle]
pub unsafe extern "C" fn ks_linking_number(
    xyz1: *const f64,
    n1: usize,
    xyz2: *const f64,
    n2: usize,
    seed: u64,
    out: *mut i64,
) -> KsStatus {
    guard(|| {
        let (a, b) = (points(xyz1, n1, "xyz1")?, points(xyz2, n2, "xyz2")?);
        put(out, linking_number(&a, &b, seed)?, "out")
    })
}
