//! C ABI for `cwforest`.
//!
//! Values cross the boundary as opaque handles ([`CwRational`], [`CwTree`],
//! [`CwRowIter`]) or as NUL-terminated UTF-8 strings. Every fallible call
//! returns a [`CwStatus`]; on failure [`cw_last_error`] describes the cause
//! for the calling thread. Strings returned through `out` parameters are
//! owned by the caller and released with [`cw_string_free`]; handles are
//! released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cwforest::contfrac::ContinuedFraction;
use cwforest::row::{self, RowConfig, RowIter};
use cwforest::{tree, Error, Rational, TreeParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    /// A row iterator has no further vertices.
    Done = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    InvalidArgument = 5,
    NotDescendant = 6,
    DigitBudget = 7,
    Panic = 8,
}

pub struct CwRational {
    value: Rational,
}

pub struct CwTree {
    params: TreeParams,
}

pub struct CwRowIter {
    inner: RowIter,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CwStatus {
    match e {
        Error::ParseRational(_) | Error::MalformedCf(_) | Error::ParsePath(_) => CwStatus::Parse,
        Error::NotDescendant { .. } => CwStatus::NotDescendant,
        Error::DigitBudget { .. } => CwStatus::DigitBudget,
        _ => CwStatus::InvalidArgument,
    }
}

struct Failure(CwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CwStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure or panic for [`cw_last_error`], and maps
/// the outcome to a status.
fn guard(f: impl FnOnce() -> Result<CwStatus, Failure>) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CwStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(CwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed_rational(value: Rational) -> *mut CwRational {
    Box::into_raw(Box::new(CwRational { value }))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"a/b"` or `"a"`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_rational_parse(text: *const c_char, out: *mut *mut CwRational) -> CwStatus {
    guard(|| {
        let value: Rational = read_str(text, "text")?.parse()?;
        put(out, boxed_rational(value), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_rational_new(num: u64, den: u64, out: *mut *mut CwRational) -> CwStatus {
    guard(|| {
        let value = Rational::new(num, den)?;
        put(out, boxed_rational(value), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// `"a/b"`; free with [`cw_string_free`]. Returns NULL for a NULL handle.
///
/// # Safety
/// `x` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_rational_to_string(x: *const CwRational) -> *mut c_char {
    match x.as_ref() {
        Some(x) => c_string(x.value.to_string()),
        None => ptr::null_mut(),
    }
}

/// Three-way comparison: -1, 0 or 1. Returns 0 if either handle is NULL.
///
/// # Safety
/// `a` and `b` must be NULL or live handles.
#[no_mangle]
pub unsafe extern "C" fn cw_rational_cmp(a: *const CwRational, b: *const CwRational) -> i32 {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => a.value.cmp(&b.value) as i32,
        _ => 0,
    }
}

/// # Safety
/// `x` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_rational_free(x: *mut CwRational) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_new(u: u64, v: u64, out: *mut *mut CwTree) -> CwStatus {
    guard(|| {
        let params = TreeParams::new(u, v)?;
        put(out, Box::into_raw(Box::new(CwTree { params })), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// # Safety
/// `t` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_free(t: *mut CwTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// Handles must be live; `left` and `right` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_children(
    t: *const CwTree,
    x: *const CwRational,
    left: *mut *mut CwRational,
    right: *mut *mut CwRational,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let x = deref(x, "x")?;
        if left.is_null() || right.is_null() {
            return Err(null("output"));
        }
        let (l, r) = tree::children(&x.value, t.params)?;
        put(left, boxed_rational(l), "left")?;
        put(right, boxed_rational(r), "right")?;
        Ok(CwStatus::Ok)
    })
}

/// Writes the parent of `x`, or NULL when `x` is an orphan root.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_parent(
    t: *const CwTree,
    x: *const CwRational,
    out: *mut *mut CwRational,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let x = deref(x, "x")?;
        let parent = tree::parent(&x.value, t.params)?;
        put(out, parent.map_or(ptr::null_mut(), boxed_rational), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// Root, depth and `L`/`R` path of `x`. The path string is owned by the caller.
///
/// # Safety
/// Handles must be live; every output pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_locate(
    t: *const CwTree,
    x: *const CwRational,
    root: *mut *mut CwRational,
    depth: *mut u64,
    path: *mut *mut c_char,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let x = deref(x, "x")?;
        if root.is_null() || depth.is_null() || path.is_null() {
            return Err(null("output"));
        }
        let loc = tree::locate(&x.value, t.params)?;
        put(depth, loc.depth, "depth")?;
        put(path, c_string(loc.path.to_string()), "path")?;
        put(root, boxed_rational(loc.root), "root")?;
        Ok(CwStatus::Ok)
    })
}

/// Whether `query` lies in the tree rooted at `ancestor`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_is_descendant(
    t: *const CwTree,
    ancestor: *const CwRational,
    query: *const CwRational,
    out: *mut bool,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let z = deref(ancestor, "ancestor")?;
        let q = deref(query, "query")?;
        put(out, tree::is_descendant(&z.value, &q.value, t.params), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// Depth of `query` below `ancestor`, or [`CwStatus::NotDescendant`].
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_depth(
    t: *const CwTree,
    ancestor: *const CwRational,
    query: *const CwRational,
    out: *mut u64,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let z = deref(ancestor, "ancestor")?;
        let q = deref(query, "query")?;
        put(out, tree::depth_from_cf(&z.value, &q.value, t.params)?, "out")?;
        Ok(CwStatus::Ok)
    })
}

/// Canonical continued fraction of `x` as `"[q0,q1,...]"`.
///
/// # Safety
/// `x` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_cf_encode(x: *const CwRational, out: *mut *mut c_char) -> CwStatus {
    guard(|| {
        let x = deref(x, "x")?;
        put(out, c_string(ContinuedFraction::encode(&x.value).to_string()), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// Value of a continued fraction written as `"[q0,q1,...]"`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_cf_decode(text: *const c_char, out: *mut *mut CwRational) -> CwStatus {
    guard(|| {
        let cf: ContinuedFraction = read_str(text, "text")?.parse()?;
        put(out, boxed_rational(cf.decode()), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// Left-to-right iterator over row `depth` of the tree rooted at `root`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_row_iter_new(
    t: *const CwTree,
    root: *const CwRational,
    depth: u32,
    out: *mut *mut CwRowIter,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let root = deref(root, "root")?;
        let inner = row::row_iter(&root.value, depth, t.params)?;
        put(out, Box::into_raw(Box::new(CwRowIter { inner })), "out")?;
        Ok(CwStatus::Ok)
    })
}

/// Writes the next vertex, or returns [`CwStatus::Done`] and writes NULL.
///
/// # Safety
/// `it` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_row_iter_next(it: *mut CwRowIter, out: *mut *mut CwRational) -> CwStatus {
    guard(|| {
        let it = it.as_mut().ok_or_else(|| null("iterator"))?;
        match it.inner.next() {
            Some(y) => {
                put(out, boxed_rational(y), "out")?;
                Ok(CwStatus::Ok)
            }
            None => {
                put(out, ptr::null_mut(), "out")?;
                Ok(CwStatus::Done)
            }
        }
    })
}

/// # Safety
/// `it` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_row_iter_free(it: *mut CwRowIter) {
    if !it.is_null() {
        drop(Box::from_raw(it));
    }
}

/// Row aggregates as a JSON object. `precision_bits == 0` selects exact
/// sums; otherwise sums are enclosures at that precision. `workers == 0`
/// uses one thread.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_row_stats_json(
    t: *const CwTree,
    root: *const CwRational,
    depth: u32,
    precision_bits: u32,
    workers: u32,
    out: *mut *mut c_char,
) -> CwStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let root = deref(root, "root")?;
        let cfg = if precision_bits == 0 {
            RowConfig::exact()
        } else {
            RowConfig::enclosure(precision_bits)
        };
        let cfg = cfg.with_workers(workers.max(1) as usize);
        let stats = row::row_stats(&root.value, depth, t.params, &cfg)?;
        let json = serde_json::to_string(&stats.to_json()).expect("serializable");
        put(out, c_string(json), "out")?;
        Ok(CwStatus::Ok)
    })
}
