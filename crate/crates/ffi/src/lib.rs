//! C ABI over the `tmnlcs` library.
//!
//! States and functions cross the boundary as opaque handles that the caller
//! releases with the matching `*_free`. Every fallible call returns a
//! [`TmnlcsStatus`]; on failure `tmnlcs_last_error_message` holds a description
//! until the next failing call on the same thread. Strings handed out by the
//! library are released with `tmnlcs_string_free`.
//!
//! Amplitudes are exchanged as interleaved `re, im` doubles.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tmnlcs::constructors::{
    build_by_exponential, build_by_recursion, build_parity_superposition, build_perelomov_closed,
    BaseKind, StateKind, StateSpec, Truncation,
};
use tmnlcs::nlfun::{self, NonlinearFunction};
use tmnlcs::transforms::{self, KerrParams};
use tmnlcs::{io, verify, Complex64, FockLadderState, TmnlcsError};

/// Result codes. `TMNLCS_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmnlcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FunctionDomain = 3,
    FunctionZero = 4,
    Convergence = 5,
    ZeroState = 6,
    ChargeMismatch = 7,
    ChargeNegative = 8,
    UnknownName = 9,
    Parse = 10,
    Schema = 11,
    Io = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

/// Construction route for `tmnlcs_state_build`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmnlcsRoute {
    Recursion = 0,
    Exponential = 1,
    /// Perelomov closed form; kind must be `perelomov`.
    PerelomovClosed = 2,
    /// Two-component superposition; kind must be a parity kind.
    ParitySuperposition = 3,
}

/// Opaque state handle.
pub struct TmnlcsState(FockLadderState);

/// Opaque nonlinear-function handle.
pub struct TmnlcsFunction(NonlinearFunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &TmnlcsError) -> TmnlcsStatus {
    match err {
        TmnlcsError::FunctionDomain { .. } => TmnlcsStatus::FunctionDomain,
        TmnlcsError::FunctionZero { .. } => TmnlcsStatus::FunctionZero,
        TmnlcsError::Convergence { .. } => TmnlcsStatus::Convergence,
        TmnlcsError::ZeroState => TmnlcsStatus::ZeroState,
        TmnlcsError::ChargeMismatch { .. } => TmnlcsStatus::ChargeMismatch,
        TmnlcsError::ChargeNegative { .. } => TmnlcsStatus::ChargeNegative,
        TmnlcsError::UnknownName(_) => TmnlcsStatus::UnknownName,
        TmnlcsError::Parse(_) => TmnlcsStatus::Parse,
        TmnlcsError::InvalidParameter(_) => TmnlcsStatus::InvalidArgument,
        TmnlcsError::Schema(_) | TmnlcsError::Json(_) | TmnlcsError::Csv(_) => TmnlcsStatus::Schema,
        TmnlcsError::Io(_) => TmnlcsStatus::Io,
    }
}

struct Failure(TmnlcsStatus, String);

impl From<TmnlcsError> for Failure {
    fn from(e: TmnlcsError) -> Self {
        Failure(status_of(&e), format!("{}: {e}", e.kind()))
    }
}

fn null(what: &str) -> Failure {
    Failure(TmnlcsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(TmnlcsStatus::InvalidArgument, msg.into())
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TmnlcsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TmnlcsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            TmnlcsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn state_handle(s: FockLadderState) -> *mut TmnlcsState {
    Box::into_raw(Box::new(TmnlcsState(s)))
}

fn function_handle(f: NonlinearFunction) -> *mut TmnlcsFunction {
    Box::into_raw(Box::new(TmnlcsFunction(f)))
}

/// Message for the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn tmnlcs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tmnlcs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a catalog name or expression into a function handle. `q` fills in
/// the charge for a bare `perelomov_full`.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_function_parse(
    text: *const c_char,
    q: u32,
    out: *mut *mut TmnlcsFunction,
) -> TmnlcsStatus {
    guard(|| {
        let f = nlfun::parse_function(str_arg(text, "text")?, q)?;
        write_out(out, function_handle(f), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn tmnlcs_function_free(f: *mut TmnlcsFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Evaluates `f(na, nb)`.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_function_evaluate(
    f: *const TmnlcsFunction,
    na: i64,
    nb: i64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TmnlcsStatus {
    guard(|| {
        let v = borrow(f, "f")?.0.evaluate(na, nb)?;
        write_out(out_re, v.re, "out_re")?;
        write_out(out_im, v.im, "out_im")
    })
}

/// Label of a function as a newly allocated string.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_function_label(
    f: *const TmnlcsFunction,
    out: *mut *mut c_char,
) -> TmnlcsStatus {
    guard(|| {
        let label = borrow(f, "f")?.0.label().replace('\0', " ");
        let c = CString::new(label).expect("NUL removed");
        write_out(out, c.into_raw(), "out")
    })
}

/// Builds a state with adaptive truncation.
///
/// `kind` is `pair`, `perelomov`, `parity_pair`, `parity_perelomov` or
/// `custom`; `custom` needs `function`, the other kinds require it to be null.
/// For Perelomov kinds the eigenvalue is the squeeze parameter xi.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_build(
    kind: *const c_char,
    function: *const TmnlcsFunction,
    eigenvalue_re: f64,
    eigenvalue_im: f64,
    q: u32,
    route: TmnlcsRoute,
    out: *mut *mut TmnlcsState,
) -> TmnlcsStatus {
    guard(|| {
        let kind = match (str_arg(kind, "kind")?, function.as_ref()) {
            ("custom", Some(f)) => StateKind::Custom(f.0.clone()),
            ("custom", None) => return Err(null("function")),
            (name, None) => StateKind::from_name(name)?,
            (_, Some(_)) => return Err(invalid("function is only used with kind `custom`")),
        };
        let ev = Complex64::new(eigenvalue_re, eigenvalue_im);
        let spec = StateSpec::new(kind, ev, q);
        let trunc = Truncation::adaptive();
        let state = match (route, &spec.kind) {
            (TmnlcsRoute::Recursion, _) => build_by_recursion(&spec)?,
            (TmnlcsRoute::Exponential, _) => build_by_exponential(&spec)?,
            (TmnlcsRoute::PerelomovClosed, StateKind::Perelomov) => {
                build_perelomov_closed(ev, q, &trunc)?
            }
            (TmnlcsRoute::ParitySuperposition, StateKind::ParityPair) => {
                build_parity_superposition(BaseKind::Pair, ev, q, &trunc)?
            }
            (TmnlcsRoute::ParitySuperposition, StateKind::ParityPerelomov) => {
                build_parity_superposition(BaseKind::Perelomov, ev, q, &trunc)?
            }
            _ => return Err(invalid("route does not apply to this kind")),
        };
        write_out(out, state_handle(state), "out")
    })
}

/// Wraps raw amplitudes (`2 * len` interleaved doubles) as a state.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_from_amplitudes(
    q: u32,
    amplitudes: *const f64,
    len: usize,
    out: *mut *mut TmnlcsState,
) -> TmnlcsStatus {
    guard(|| {
        if amplitudes.is_null() {
            return Err(null("amplitudes"));
        }
        let raw = std::slice::from_raw_parts(amplitudes, 2 * len);
        let amps = raw
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        write_out(out, state_handle(FockLadderState::new(q, amps)?), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_free(s: *mut TmnlcsState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_clone(
    s: *const TmnlcsState,
    out: *mut *mut TmnlcsState,
) -> TmnlcsStatus {
    guard(|| {
        let copy = borrow(s, "state")?.0.clone();
        write_out(out, state_handle(copy), "out")
    })
}

/// Charge `q`, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_charge(s: *const TmnlcsState) -> u32 {
    s.as_ref().map_or(0, |s| s.0.charge_q())
}

/// Number of amplitudes (`truncation_n + 1`), or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_len(s: *const TmnlcsState) -> usize {
    s.as_ref().map_or(0, |s| s.0.amplitudes().len())
}

/// Whether the truncation converged; false for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_converged(s: *const TmnlcsState) -> bool {
    s.as_ref().is_some_and(|s| s.0.converged())
}

/// Copies the amplitudes into `buf` as `re, im` pairs. `capacity` counts
/// doubles and must be at least `2 * tmnlcs_state_len(s)`.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_amplitudes(
    s: *const TmnlcsState,
    buf: *mut f64,
    capacity: usize,
) -> TmnlcsStatus {
    guard(|| {
        let amps = borrow(s, "state")?.0.amplitudes();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if capacity < 2 * amps.len() {
            return Err(Failure(
                TmnlcsStatus::BufferTooSmall,
                format!("need {} doubles, got {capacity}", 2 * amps.len()),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, 2 * amps.len());
        for (pair, c) in out.chunks_exact_mut(2).zip(amps) {
            pair[0] = c.re;
            pair[1] = c.im;
        }
        Ok(())
    })
}

/// Serializes a state to the JSON interchange format.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_to_json(
    s: *const TmnlcsState,
    out: *mut *mut c_char,
) -> TmnlcsStatus {
    guard(|| {
        let text = io::state_to_json(&borrow(s, "state")?.0)?;
        let c = CString::new(text).expect("JSON has no NUL");
        write_out(out, c.into_raw(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_from_json(
    text: *const c_char,
    out: *mut *mut TmnlcsState,
) -> TmnlcsStatus {
    guard(|| {
        let state = io::state_from_json(str_arg(text, "text")?)?;
        write_out(out, state_handle(state), "out")
    })
}

/// Applies `a†^m b†^n` and normalizes. If `out_function` is non-null it
/// receives the function the result is an eigenstate for.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_photon_add(
    s: *const TmnlcsState,
    f: *const TmnlcsFunction,
    m: u32,
    n: u32,
    out: *mut *mut TmnlcsState,
    out_function: *mut *mut TmnlcsFunction,
) -> TmnlcsStatus {
    guard(|| {
        let t = transforms::photon_add(&borrow(s, "state")?.0, &borrow(f, "f")?.0, m, n)?;
        finish_transform(t, out, out_function)
    })
}

/// Applies `a^m b^n` and normalizes; outputs as for `tmnlcs_photon_add`.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_photon_subtract(
    s: *const TmnlcsState,
    f: *const TmnlcsFunction,
    m: u32,
    n: u32,
    out: *mut *mut TmnlcsState,
    out_function: *mut *mut TmnlcsFunction,
) -> TmnlcsStatus {
    guard(|| {
        let t = transforms::photon_subtract(&borrow(s, "state")?.0, &borrow(f, "f")?.0, m, n)?;
        finish_transform(t, out, out_function)
    })
}

unsafe fn finish_transform(
    t: transforms::Transformed,
    out: *mut *mut TmnlcsState,
    out_function: *mut *mut TmnlcsFunction,
) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(state_handle(t.state));
    if !out_function.is_null() {
        out_function.write(function_handle(t.induced));
    }
    Ok(())
}

/// Kerr evolution `c_n -> exp(-i gamma_t n(n-1)) c_n`.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_kerr_evolve(
    s: *const TmnlcsState,
    gamma_t: f64,
    out: *mut *mut TmnlcsState,
) -> TmnlcsStatus {
    guard(|| {
        let params = KerrParams::new(gamma_t)?;
        let (state, _) = transforms::kerr_evolve(&borrow(s, "state")?.0, params);
        write_out(out, state_handle(state), "out")
    })
}

/// `||f ab psi - alpha psi|| / max(|alpha|, 1)` over the interior rungs.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_eigen_residual(
    s: *const TmnlcsState,
    f: *const TmnlcsFunction,
    alpha_re: f64,
    alpha_im: f64,
    out: *mut f64,
) -> TmnlcsStatus {
    guard(|| {
        let r = verify::eigen_residual(
            &borrow(s, "state")?.0,
            &borrow(f, "f")?.0,
            Complex64::new(alpha_re, alpha_im),
        )?;
        write_out(out, r, "out")
    })
}

/// `|<s1|s2>|` for normalized inputs.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_fidelity(
    s1: *const TmnlcsState,
    s2: *const TmnlcsState,
    out: *mut f64,
) -> TmnlcsStatus {
    guard(|| {
        let v = verify::fidelity(&borrow(s1, "s1")?.0, &borrow(s2, "s2")?.0)?;
        write_out(out, v, "out")
    })
}

/// Photon statistics as a JSON object string.
#[no_mangle]
pub unsafe extern "C" fn tmnlcs_state_stats_json(
    s: *const TmnlcsState,
    out: *mut *mut c_char,
) -> TmnlcsStatus {
    guard(|| {
        let stats = verify::photon_statistics(&borrow(s, "state")?.0);
        let c = CString::new(io::to_json_string(&stats)?).expect("JSON has no NUL");
        write_out(out, c.into_raw(), "out")
    })
}
