//! C ABI over the `urysohn` library.
//!
//! Spaces cross the boundary as opaque handles or as the JSON format
//! `{"n": int, "d": [["p/q", ...], ...]}`. Every fallible call returns a
//! [`UryStatus`]; on failure a message is kept per thread and can be fetched
//! with [`ury_last_error_message`]. Strings returned by this library must be
//! released with [`ury_string_free`], handles with [`ury_space_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use urysohn::builder::{build_with, check_extension, BuildConfig};
use urysohn::cli::SpaceFile;
use urysohn::discretize::{ceil_metric, collapse_metric};
use urysohn::distance_sets::{check_four_values, classify, DistanceSet};
use urysohn::rat::parse_list;
use urysohn::{Error, FiniteMetricSpace};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UryStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NotMetric = 4,
    OutOfRange = 5,
    SizeCapExceeded = 6,
    Failed = 7,
    Panic = 8,
}

/// Opaque handle to a finite metric space.
pub struct UrySpace {
    inner: FiniteMetricSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> UryStatus {
    match e {
        Error::Parse(_) => UryStatus::Parse,
        Error::NotMetric(_) | Error::NotSquare { .. } => UryStatus::NotMetric,
        Error::OutOfRange { .. } | Error::IndexOutOfRange { .. } | Error::ValueOutOfRange(_) => UryStatus::OutOfRange,
        Error::SizeCapExceeded { .. } => UryStatus::SizeCapExceeded,
        Error::InvalidArgument(_) | Error::InvalidDistanceSet(_) | Error::OffGrid { .. } => UryStatus::InvalidArgument,
        _ => UryStatus::Failed,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard<F>(f: F) -> UryStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            UryStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            UryStatus::Panic
        }
    }
}

struct Fail(UryStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UryStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(UryStatus::Parse, format!("{what} is not valid UTF-8")))
}

unsafe fn space_ref<'a>(p: *const UrySpace) -> Result<&'a FiniteMetricSpace, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("space"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(UryStatus::Failed, "string contains a NUL byte".into()))
}

fn new_handle(space: FiniteMetricSpace) -> *mut UrySpace {
    Box::into_raw(Box::new(UrySpace { inner: space }))
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn ury_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL if the last call
/// succeeded. Free with `ury_string_free`.
#[no_mangle]
pub extern "C" fn ury_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ury_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a space from JSON and checks the metric axioms.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_space_from_json(json: *const c_char, out: *mut *mut UrySpace) -> UryStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let file: SpaceFile = serde_json::from_str(text).map_err(|e| Fail(UryStatus::Parse, e.to_string()))?;
        let space = file.space()?;
        if let Some(v) = space.validate().first() {
            return Err(Error::NotMetric(v.to_string()).into());
        }
        write_out(out, new_handle(space), "out")
    })
}

/// Serializes a space to JSON. Free the result with `ury_string_free`.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_space_to_json(space: *const UrySpace, out: *mut *mut c_char) -> UryStatus {
    guard(|| {
        let x = space_ref(space)?;
        let json = serde_json::to_string(&SpaceFile::plain(x)).map_err(|e| Fail(UryStatus::Failed, e.to_string()))?;
        write_out(out, into_c_string(json)?, "out")
    })
}

/// Releases a space handle. NULL is ignored.
///
/// # Safety
/// `space` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ury_space_free(space: *mut UrySpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_space_len(space: *const UrySpace, out: *mut usize) -> UryStatus {
    guard(|| write_out(out, space_ref(space)?.len(), "out"))
}

/// Distance between points `i` and `j` as a reduced fraction.
///
/// # Safety
/// `space` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_space_distance(
    space: *const UrySpace,
    i: usize,
    j: usize,
    num: *mut i64,
    den: *mut i64,
) -> UryStatus {
    guard(|| {
        let x = space_ref(space)?;
        for index in [i, j] {
            if index >= x.len() {
                return Err(Error::IndexOutOfRange { index, len: x.len() }.into());
            }
        }
        let d = x.d(i, j);
        write_out(num, d.numer(), "num")?;
        write_out(den, d.denom(), "den")
    })
}

/// Rounds every distance up to `[0,1]_m`.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_space_ceil(space: *const UrySpace, m: u32, out: *mut *mut UrySpace) -> UryStatus {
    guard(|| {
        let y = ceil_metric(space_ref(space)?, m)?;
        write_out(out, new_handle(y), "out")
    })
}

/// Collapses every distance onto `[0,1]_m`.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_space_collapse(space: *const UrySpace, m: u32, out: *mut *mut UrySpace) -> UryStatus {
    guard(|| {
        let y = collapse_metric(space_ref(space)?, m)?;
        write_out(out, new_handle(y), "out")
    })
}

/// Builds a finite approximation over the comma-separated `alphabet`.
/// `closed_after` receives the number of rounds after which nothing was
/// missing, or -1 if the build did not close.
///
/// # Safety
/// `alphabet` must be a NUL-terminated string; `out` and `closed_after`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_build_approx(
    alphabet: *const c_char,
    rounds: usize,
    budget: usize,
    seed: u64,
    size_cap: usize,
    out: *mut *mut UrySpace,
    closed_after: *mut i64,
) -> UryStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if closed_after.is_null() {
            return Err(null("closed_after"));
        }
        let s = DistanceSet::new(parse_list(read_str(alphabet, "alphabet")?)?)?;
        let config = BuildConfig::new(rounds, budget).seed(seed).size_cap(size_cap);
        let approx = build_with(&s, &config)?;
        write_out(closed_after, approx.closed_after.map_or(-1, |r| r as i64), "closed_after")?;
        write_out(out, new_handle(approx.space), "out")
    })
}

/// Counts extension profiles over subspaces of at most `k` points that no
/// point realizes. A NULL `alphabet` uses the distances occurring in the space.
///
/// # Safety
/// `space` must be a live handle; `alphabet` is NULL or NUL-terminated;
/// `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_check_extension(
    space: *const UrySpace,
    alphabet: *const c_char,
    k: usize,
    count: *mut usize,
) -> UryStatus {
    guard(|| {
        let x = space_ref(space)?;
        let values = if alphabet.is_null() {
            x.distance_values()
        } else {
            DistanceSet::new(parse_list(read_str(alphabet, "alphabet")?)?)?.values().to_vec()
        };
        write_out(count, check_extension(x, &values, k).len(), "count")
    })
}

/// Whether the comma-separated set satisfies the 4-values condition.
///
/// # Safety
/// `set` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_four_values(set: *const c_char, out: *mut bool) -> UryStatus {
    guard(|| {
        let s = DistanceSet::new(parse_list(read_str(set, "set")?)?)?;
        write_out(out, check_four_values(&s), "out")
    })
}

/// Number of classes of `m`-element distance sets, in total and among those
/// satisfying the 4-values condition.
///
/// # Safety
/// `total` and `satisfying` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ury_classify_counts(m: usize, total: *mut usize, satisfying: *mut usize) -> UryStatus {
    guard(|| {
        if total.is_null() || satisfying.is_null() {
            return Err(null("output"));
        }
        let report = classify(m);
        write_out(total, report.total_classes, "total")?;
        write_out(satisfying, report.four_values_classes, "satisfying")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last_error() -> String {
        let p = ury_last_error_message();
        assert!(!p.is_null());
        let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
        unsafe { ury_string_free(p) };
        s
    }

    #[test]
    fn round_trip_through_json() {
        let json = c(r#"{"n":3,"d":[["0","1/2","1"],["1/2","0","1/2"],["1","1/2","0"]]}"#);
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { ury_space_from_json(json.as_ptr(), &mut h) }, UryStatus::Ok);
        let mut n = 0;
        assert_eq!(unsafe { ury_space_len(h, &mut n) }, UryStatus::Ok);
        assert_eq!(n, 3);
        let (mut p, mut q) = (0, 0);
        assert_eq!(unsafe { ury_space_distance(h, 0, 2, &mut p, &mut q) }, UryStatus::Ok);
        assert_eq!((p, q), (1, 1));
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { ury_space_to_json(h, &mut s) }, UryStatus::Ok);
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        assert_eq!(text, r#"{"n":3,"d":[["0","1/2","1"],["1/2","0","1/2"],["1","1/2","0"]]}"#);
        unsafe {
            ury_string_free(s);
            ury_space_free(h);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        let bad = c(r#"{"n":3,"d":[["0","1/3","1"],["1/3","0","1/3"],["1","1/3","0"]]}"#);
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { ury_space_from_json(bad.as_ptr(), &mut h) }, UryStatus::NotMetric);
        assert!(h.is_null());
        assert!(last_error().contains("triangle"));

        assert_eq!(unsafe { ury_space_len(ptr::null(), &mut 0) }, UryStatus::NullPointer);
        assert_eq!(unsafe { ury_four_values(c("1,x").as_ptr(), &mut false) }, UryStatus::Parse);

        let mut ok = false;
        assert_eq!(unsafe { ury_four_values(c("1,2,3").as_ptr(), &mut ok) }, UryStatus::Ok);
        assert!(ok);
        assert!(ury_last_error_message().is_null());
    }

    #[test]
    fn distance_index_is_checked() {
        let json = c(r#"{"n":1,"d":[["0"]]}"#);
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { ury_space_from_json(json.as_ptr(), &mut h) }, UryStatus::Ok);
        let (mut p, mut q) = (0, 0);
        assert_eq!(unsafe { ury_space_distance(h, 0, 1, &mut p, &mut q) }, UryStatus::OutOfRange);
        unsafe { ury_space_free(h) };
    }

    #[test]
    fn build_and_check() {
        let mut h = ptr::null_mut();
        let mut closed = 0;
        let st = unsafe { ury_build_approx(c("1/2,1").as_ptr(), 6, 2, 0, 200, &mut h, &mut closed) };
        assert_eq!(st, UryStatus::Ok);
        assert!(closed >= 0);
        let mut missing = usize::MAX;
        assert_eq!(unsafe { ury_check_extension(h, ptr::null(), 2, &mut missing) }, UryStatus::Ok);
        assert_eq!(missing, 0);
        unsafe { ury_space_free(h) };

        let st = unsafe { ury_build_approx(c("1/3,2/3,1").as_ptr(), 5, 2, 0, 5, &mut h, &mut closed) };
        assert_eq!(st, UryStatus::SizeCapExceeded);
    }

    #[test]
    fn classification_counts() {
        let (mut total, mut sat) = (0, 0);
        assert_eq!(unsafe { ury_classify_counts(3, &mut total, &mut sat) }, UryStatus::Ok);
        assert_eq!((total, sat), (7, 6));
    }
}
