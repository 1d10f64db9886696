//! C interface to the HOMFLY-PT engine.
//!
//! Diagrams live behind an opaque handle. Every call returns a status code;
//! on failure a thread-local message is available from
//! [`homfly_last_error`]. Strings handed out by the library must be released
//! with [`homfly_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use homfly::fpt::{homfly_fpt, FptError, FptOptions};
use homfly::kauffman::{homfly_kauffman, ArcOrder};
use homfly::link::{parse_pd, LinkDiagram};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomflyStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    NoComponents = 4,
    WidthBudgetExceeded = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomflyAlgorithm {
    Kauffman = 0,
    Fpt = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomflyRender {
    /// `a^2 + a^-2 - z^2 - 1`
    Human = 0,
    /// JSON list of `[a, z, "coefficient"]` terms.
    Json = 1,
}

/// Opaque diagram handle.
pub struct HomflyDiagram {
    inner: LinkDiagram,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HomflyStatus, msg: impl Into<String>) -> HomflyStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`HomflyStatus::Internal`].
fn guard(f: impl FnOnce() -> HomflyStatus) -> HomflyStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(HomflyStatus::Internal, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, HomflyStatus> {
    if s.is_null() {
        return Err(fail(HomflyStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(HomflyStatus::InvalidUtf8, "input is not UTF-8"))
}

unsafe fn parse_into(
    text: *const c_char,
    out: *mut *mut HomflyDiagram,
    parse: fn(&str) -> Result<LinkDiagram, homfly::link::LinkError>,
) -> HomflyStatus {
    if out.is_null() {
        return fail(HomflyStatus::NullArgument, "null output pointer");
    }
    *out = ptr::null_mut();
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match parse(text) {
        Ok(d) => {
            *out = Box::into_raw(Box::new(HomflyDiagram { inner: d }));
            HomflyStatus::Ok
        }
        Err(e) => fail(HomflyStatus::ParseError, e.to_string()),
    }
}

/// Parses a PD code such as `X[1,5,2,4], X[3,1,4,6], X[5,3,6,2]`.
///
/// # Safety
/// `pd` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homfly_diagram_from_pd(pd: *const c_char, out: *mut *mut HomflyDiagram) -> HomflyStatus {
    guard(|| parse_into(pd, out, parse_pd))
}

/// Parses the JSON diagram format.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homfly_diagram_from_json(json: *const c_char, out: *mut *mut HomflyDiagram) -> HomflyStatus {
    guard(|| parse_into(json, out, LinkDiagram::from_json_str))
}

/// Releases a diagram. Null is ignored.
///
/// # Safety
/// `d` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn homfly_diagram_free(d: *mut HomflyDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of crossings, or -1 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn homfly_diagram_crossings(d: *const HomflyDiagram) -> i64 {
    d.as_ref().map_or(-1, |d| d.inner.crossing_count() as i64)
}

/// Writhe through `out`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homfly_diagram_writhe(d: *const HomflyDiagram, out: *mut i64) -> HomflyStatus {
    let (Some(d), false) = (d.as_ref(), out.is_null()) else {
        return fail(HomflyStatus::NullArgument, "null argument");
    };
    *out = d.inner.writhe();
    HomflyStatus::Ok
}

/// Computes the polynomial and stores an owned string in `out`.
///
/// `width_budget` bounds the DP table size; 0 selects the default. It is
/// ignored by the Kauffman algorithm.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homfly_compute(
    d: *const HomflyDiagram,
    algorithm: HomflyAlgorithm,
    render: HomflyRender,
    width_budget: u64,
    out: *mut *mut c_char,
) -> HomflyStatus {
    guard(|| {
        if out.is_null() {
            return fail(HomflyStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(d) = d.as_ref() else {
            return fail(HomflyStatus::NullArgument, "null diagram");
        };
        let result = match algorithm {
            HomflyAlgorithm::Kauffman => homfly_kauffman(&d.inner, &ArcOrder::natural(d.inner.arc_count()))
                .map_err(|e| fail(HomflyStatus::NoComponents, e.to_string())),
            HomflyAlgorithm::Fpt => {
                let mut options = FptOptions { validate_tables: false, ..FptOptions::default() };
                if width_budget > 0 {
                    options.width_budget = usize::try_from(width_budget).unwrap_or(usize::MAX);
                }
                homfly_fpt(&d.inner, &options).map_err(|e| {
                    let status = match e {
                        FptError::NoComponents => HomflyStatus::NoComponents,
                        FptError::WidthBudgetExceeded { .. } => HomflyStatus::WidthBudgetExceeded,
                        _ => HomflyStatus::Internal,
                    };
                    fail(status, e.to_string())
                })
            }
        };
        let p = match result {
            Ok(p) => p,
            Err(status) => return status,
        };
        let text = match render {
            HomflyRender::Human => p.render(),
            HomflyRender::Json => p.to_json().to_string(),
        };
        *out = CString::new(text).expect("rendered polynomials have no nul").into_raw();
        HomflyStatus::Ok
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn homfly_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn homfly_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
