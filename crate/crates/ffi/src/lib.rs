//! C ABI over `necwb-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or a
//! builder and released by the matching `*_free`. Every fallible call returns
//! a [`NecwbStatus`]; on failure the message is available from
//! [`necwb_last_error`] on the same thread. Strings returned through `char **`
//! belong to the caller and are released with [`necwb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use necwb_core::codeeval::NetworkCode;
use necwb_core::counterexample::{build_cx_code, build_cx_code_rate_k, build_cx_instances};
use necwb_core::files::{self, Instance, ReportFile, RunConfig};
use necwb_core::reduction::build_gadget;
use necwb_core::verifier::{verify_nec, VerifyOptions};
use necwb_core::{Error, Limits};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NecwbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Mismatch = 5,
    LimitExceeded = 6,
    Precondition = 7,
    Internal = 8,
}

/// A network instance: multiple-unicast, NEC, or NEC with gadget roles.
pub struct NecwbInstance(Instance);

/// A network code.
pub struct NecwbCode(NetworkCode);

/// The outcome of an exhaustive verification.
pub struct NecwbReport(ReportFile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NecwbStatus {
    match e {
        Error::Json(_) | Error::Io(_) => NecwbStatus::Parse,
        Error::Cycle { .. }
        | Error::DanglingEndpoint { .. }
        | Error::NonPositiveCapacity { .. }
        | Error::DuplicateId { .. }
        | Error::UnknownNode(_)
        | Error::UnknownEdge(_)
        | Error::InvalidInstance(_)
        | Error::NotGadget(_)
        | Error::BadFunction(_)
        | Error::BadPattern(_) => NecwbStatus::Validation,
        Error::CodeMismatch(_)
        | Error::WidthMismatch { .. }
        | Error::FingerprintMismatch { .. }
        | Error::NotRelayNormalized { .. } => NecwbStatus::Mismatch,
        Error::LimitExceeded { .. } => NecwbStatus::LimitExceeded,
        Error::Precondition(_) => NecwbStatus::Precondition,
        Error::Inconsistent(_) => NecwbStatus::Internal,
    }
}

enum Fail {
    Status(NecwbStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `body`, converting errors and panics into a status plus last-error text.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> NecwbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NecwbStatus::Ok
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Ok(Err(Fail::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("panic inside necwb".into());
            NecwbStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(NecwbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(NecwbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Status(NecwbStatus::Internal, "string has a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), Fail> {
    if out.is_null() {
        Err(null("output pointer"))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next necwb call on this thread.
#[no_mangle]
pub extern "C" fn necwb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn necwb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from a necwb function returning `char **`, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance description.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_instance_from_json(json: *const c_char, out: *mut *mut NecwbInstance) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let inst = files::parse_instance(read_str(json, "json")?)?;
        put(out, NecwbInstance(inst));
        Ok(())
    })
}

/// # Safety
/// `inst` must be a live instance handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_instance_to_json(inst: *const NecwbInstance, out: *mut *mut c_char) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let inst = handle(inst, "instance")?;
        put_string(out, files::to_json(&inst.0.to_file()))
    })
}

/// Number of branches of a gadget instance, 0 for anything else.
///
/// # Safety
/// `inst` must be a live instance handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_instance_branch_count(inst: *const NecwbInstance) -> usize {
    match inst.as_ref() {
        Some(NecwbInstance(Instance::Gadget(g))) => g.k(),
        _ => 0,
    }
}

/// # Safety
/// `inst` must come from this library and not be used afterwards, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_instance_free(inst: *mut NecwbInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Wraps a multiple-unicast instance in the reduction gadget.
///
/// # Safety
/// `mu` must be a live instance handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_build_gadget(mu: *const NecwbInstance, out: *mut *mut NecwbInstance) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let Instance::MultipleUnicast(mu) = &handle(mu, "instance")?.0 else {
            return Err(Fail::Status(NecwbStatus::Validation, "expected a multiple-unicast instance".into()));
        };
        put(out, NecwbInstance(Instance::Gadget(build_gadget(mu)?)));
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_code_from_json(json: *const c_char, out: *mut *mut NecwbCode) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let code = files::parse_code(read_str(json, "json")?)?;
        put(out, NecwbCode(code));
        Ok(())
    })
}

/// # Safety
/// `code` must be a live code handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_code_to_json(code: *const NecwbCode, out: *mut *mut c_char) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, files::to_json(&handle(code, "code")?.0))
    })
}

/// Content fingerprint of a code, `sha256:<hex>`.
///
/// # Safety
/// `code` must be a live code handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_code_fingerprint(code: *const NecwbCode, out: *mut *mut c_char) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, handle(code, "code")?.0.fingerprint())
    })
}

/// # Safety
/// `code` must come from this library and not be used afterwards, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_code_free(code: *mut NecwbCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// The gadget around the two-relay network with `k` pairs.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_cx_instance(k: usize, out: *mut *mut NecwbInstance) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let (_, g) = build_cx_instances(k)?;
        put(out, NecwbInstance(Instance::Gadget(g)));
        Ok(())
    })
}

/// The counterexample code at block length `n`; `rate_k` selects the rate-k
/// reading instead of the native rate `k - k/n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_cx_code(k: usize, n: u32, rate_k: bool, out: *mut *mut NecwbCode) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let (_, g) = build_cx_instances(k)?;
        let build = if rate_k { build_cx_code_rate_k } else { build_cx_code };
        let cx = build(&g, k, n, Limits::default().max_table_entries)?;
        put(out, NecwbCode(cx.code));
        Ok(())
    })
}

/// Exhaustively verifies `code` on an NEC instance. A zero limit selects the
/// default.
///
/// # Safety
/// `inst` and `code` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_verify(
    inst: *const NecwbInstance,
    code: *const NecwbCode,
    max_patterns: u64,
    max_messages: u64,
    out: *mut *mut NecwbReport,
) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        let inst = &handle(inst, "instance")?.0;
        let code = &handle(code, "code")?.0;
        let nec = inst
            .nec()
            .ok_or_else(|| Fail::Status(NecwbStatus::Validation, "expected an NEC instance".into()))?;
        let defaults = Limits::default();
        let limits = Limits {
            max_patterns: if max_patterns == 0 { defaults.max_patterns } else { max_patterns },
            max_messages: if max_messages == 0 { defaults.max_messages } else { max_messages },
            ..defaults
        };
        let opts = VerifyOptions {
            limits,
            ..Default::default()
        };
        let r = verify_nec(nec, code, &opts)?;
        let config = RunConfig {
            command: "verify".into(),
            inputs: Vec::new(),
            max_patterns: limits.max_patterns,
            max_messages: limits.max_messages,
            max_cut_edges: limits.max_cut_edges,
            workers: None,
            seed: None,
        };
        put(out, NecwbReport(ReportFile::from_report(&nec.network, &r, config)));
        Ok(())
    })
}

/// Writes the exact error fraction as `num / den`.
///
/// # Safety
/// `report` must be a live report handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_report_epsilon(report: *const NecwbReport, num: *mut u64, den: *mut u64) -> NecwbStatus {
    guard(|| {
        check_out(num)?;
        check_out(den)?;
        let eps = handle(report, "report")?.0.epsilon;
        *num = *eps.numer();
        *den = *eps.denom();
        Ok(())
    })
}

/// Number of good messages, 0 for NULL.
///
/// # Safety
/// `report` must be a live report handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_report_good_count(report: *const NecwbReport) -> u64 {
    report.as_ref().map_or(0, |r| r.0.good_count)
}

/// Number of bad messages, 0 for NULL.
///
/// # Safety
/// `report` must be a live report handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_report_bad_count(report: *const NecwbReport) -> u64 {
    report.as_ref().map_or(0, |r| r.0.bad.len() as u64)
}

/// Number of error patterns tried per message, 0 for NULL.
///
/// # Safety
/// `report` must be a live report handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_report_pattern_count(report: *const NecwbReport) -> u64 {
    report.as_ref().map_or(0, |r| r.0.pattern_count)
}

/// # Safety
/// `report` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn necwb_report_to_json(report: *const NecwbReport, out: *mut *mut c_char) -> NecwbStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, files::to_json(&handle(report, "report")?.0))
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn necwb_report_free(report: *mut NecwbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
