//! C ABI for the exact algebra engine: JSON request in, JSON response out.
//!
//! Every request is a single JSON object with a `"command"` key naming one
//! of the engine's operations (`symbol`, `isotropy`, `quat`, `similitude`,
//! `outness`, `descend`, `verify-claims`) plus that command's parameters,
//! exactly mirroring the CLI payloads. The response is a JSON object with a
//! `"code"` field (0 = decided, 2 = the engine answered unknown, 1 = error)
//! and either a `"report"` or an `"error"` field.
//!
//! All returned strings are NUL-terminated, UTF-8, and owned by this
//! library; release them with `outsim_free`. The engine is pure and
//! re-entrant: calls may run concurrently from any thread.

use std::ffi::{c_char, c_int, CStr, CString};

/// Evaluate a JSON request and store the exit code in `*code_out` when
/// `code_out` is non-null. Returns a newly allocated response string, or
/// null only if `request` is null or not valid UTF-8 (in which case the
/// code is set to 1).
///
/// # Safety
/// `request` must be a NUL-terminated string or null; `code_out` must be
/// null or point to writable memory for one `int`.
#[no_mangle]
pub unsafe extern "C" fn outsim_eval(
    request: *const c_char,
    code_out: *mut c_int,
) -> *mut c_char {
    let set_code = |c: i32| {
        if !code_out.is_null() {
            unsafe { *code_out = c };
        }
    };
    if request.is_null() {
        set_code(1);
        return std::ptr::null_mut();
    }
    let Ok(text) = unsafe { CStr::from_ptr(request) }.to_str() else {
        set_code(1);
        return std::ptr::null_mut();
    };
    let (value, code) = outsim::cli::eval_json(text);
    set_code(code);
    let rendered = serde_json::to_string(&value).unwrap_or_else(|_| "{}".into());
    // a JSON string never contains interior NULs
    CString::new(rendered).expect("NUL-free JSON").into_raw()
}

/// Release a string previously returned by this library. Passing null is a
/// no-op.
///
/// # Safety
/// `ptr` must be null or a pointer obtained from `outsim_eval` /
/// `outsim_version_string` that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn outsim_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(unsafe { CString::from_raw(ptr) });
    }
}

/// Newly allocated version string of the underlying engine; release with
/// `outsim_free`.
#[no_mangle]
pub extern "C" fn outsim_version_string() -> *mut c_char {
    CString::new(env!("CARGO_PKG_VERSION"))
        .expect("static version")
        .into_raw()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn eval(request: &str) -> (serde_json::Value, i32) {
        let req = CString::new(request).unwrap();
        let mut code: c_int = -1;
        let out = unsafe { outsim_eval(req.as_ptr(), &mut code) };
        assert!(!out.is_null());
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        unsafe { outsim_free(out) };
        (serde_json::from_str(&text).unwrap(), code)
    }

    #[test]
    fn round_trips_a_symbol_request() {
        let (resp, code) = eval(r#"{"command": "symbol", "a": "-1", "b": "-1", "place": "2"}"#);
        assert_eq!(code, 0);
        assert_eq!(resp["report"]["symbol"], -1);
    }

    #[test]
    fn reports_errors_in_band() {
        let (resp, code) = eval(r#"{"command": "symbol", "a": "0", "b": "1", "place": "2"}"#);
        assert_eq!(code, 1);
        assert!(resp["error"].is_string());

        let (_, code) = eval("not json");
        assert_eq!(code, 1);
    }

    #[test]
    fn null_inputs_are_safe() {
        let mut code: c_int = -1;
        let out = unsafe { outsim_eval(std::ptr::null(), &mut code) };
        assert!(out.is_null());
        assert_eq!(code, 1);
        unsafe { outsim_free(std::ptr::null_mut()) };
    }

    #[test]
    fn version_is_allocated() {
        let v = outsim_version_string();
        assert!(!v.is_null());
        unsafe { outsim_free(v) };
    }
}
