//! C interface to the envcode codec and bounds.
//!
//! Results come back through opaque handles that the caller releases with the
//! matching `*_free` function. Every entry point returns an [`EnvcStatus`];
//! output pointers are written only on success.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use envcode::bounds::{powerlaw_bounds, regret_upper_bound};
use envcode::codec::{decode_bytes, encode_to_bytes, CodecParams};
use envcode::envelope::Envelope;
use envcode::Error;

/// Status code returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvcStatus {
    Ok = 0,
    NullPointer = 1,
    /// An argument is outside the operation's domain.
    Domain = 2,
    /// The container payload could not be decoded.
    Decode = 3,
    /// The container header is malformed.
    Format = 4,
    /// A size or arithmetic limit would be exceeded.
    Resource = 5,
    Io = 6,
    /// An internal error was caught at the boundary.
    Internal = 7,
}

impl From<&Error> for EnvcStatus {
    fn from(err: &Error) -> Self {
        match err {
            Error::Domain(_) => Self::Domain,
            Error::Decode(_) => Self::Decode,
            Error::Format(_) => Self::Format,
            Error::Resource(_) => Self::Resource,
            Error::Io(_) => Self::Io,
        }
    }
}

/// Serialized container bytes.
pub struct EnvcBuffer {
    bytes: Vec<u8>,
}

/// A decoded integer sequence.
pub struct EnvcSequence {
    values: Vec<u64>,
}

/// Runs `body`, turning a panic into [`EnvcStatus::Internal`]. Handles are
/// only published after the body succeeds, so no broken state escapes.
fn guarded(body: impl FnOnce() -> Result<(), EnvcStatus>) -> EnvcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EnvcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => EnvcStatus::Internal,
    }
}

/// Views `len` elements at `data`; a null pointer is accepted only when empty.
unsafe fn input<'a, T>(data: *const T, len: usize) -> Result<&'a [T], EnvcStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(EnvcStatus::NullPointer);
    }
    Ok(slice::from_raw_parts(data, len))
}

fn lift<T>(result: envcode::Result<T>) -> Result<T, EnvcStatus> {
    result.map_err(|e| EnvcStatus::from(&e))
}

unsafe fn encode_with(
    values: *const u64,
    len: usize,
    params: envcode::Result<CodecParams>,
    out: *mut *mut EnvcBuffer,
) -> EnvcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(EnvcStatus::NullPointer);
        }
        let values = input(values, len)?;
        let bytes = lift(params.and_then(|p| encode_to_bytes(values, &p)))?;
        *out = Box::into_raw(Box::new(EnvcBuffer { bytes }));
        Ok(())
    })
}

/// Encodes `len` positive integers with the scheduled cutoffs of a power-law
/// envelope `c_env·k^{-alpha}`.
///
/// # Safety
/// `values` must point to `len` readable integers (or be null with `len == 0`)
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn envc_encode_fixed(
    values: *const u64,
    len: usize,
    alpha: f64,
    c_env: f64,
    out: *mut *mut EnvcBuffer,
) -> EnvcStatus {
    encode_with(values, len, CodecParams::fixed(alpha, c_env), out)
}

/// Encodes with the constant cutoff `ceil(mu · distinct count)`.
///
/// # Safety
/// Same contract as [`envc_encode_fixed`].
#[no_mangle]
pub unsafe extern "C" fn envc_encode_adaptive(
    values: *const u64,
    len: usize,
    mu: f64,
    out: *mut *mut EnvcBuffer,
) -> EnvcStatus {
    encode_with(values, len, CodecParams::adaptive(mu), out)
}

/// # Safety
/// `buffer` must come from an encode call and not be freed.
#[no_mangle]
pub unsafe extern "C" fn envc_buffer_data(buffer: *const EnvcBuffer) -> *const u8 {
    buffer.as_ref().map_or(ptr::null(), |b| b.bytes.as_ptr())
}

/// # Safety
/// `buffer` must come from an encode call and not be freed.
#[no_mangle]
pub unsafe extern "C" fn envc_buffer_len(buffer: *const EnvcBuffer) -> usize {
    buffer.as_ref().map_or(0, |b| b.bytes.len())
}

/// # Safety
/// `buffer` must be null or come from an encode call; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn envc_buffer_free(buffer: *mut EnvcBuffer) {
    if !buffer.is_null() {
        drop(Box::from_raw(buffer));
    }
}

/// Decodes a container.
///
/// # Safety
/// `bytes` must point to `len` readable bytes (or be null with `len == 0`)
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn envc_decode(bytes: *const u8, len: usize, out: *mut *mut EnvcSequence) -> EnvcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(EnvcStatus::NullPointer);
        }
        let values = lift(decode_bytes(input(bytes, len)?))?;
        *out = Box::into_raw(Box::new(EnvcSequence { values }));
        Ok(())
    })
}

/// # Safety
/// `sequence` must come from [`envc_decode`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn envc_sequence_data(sequence: *const EnvcSequence) -> *const u64 {
    sequence.as_ref().map_or(ptr::null(), |s| s.values.as_ptr())
}

/// # Safety
/// `sequence` must come from [`envc_decode`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn envc_sequence_len(sequence: *const EnvcSequence) -> usize {
    sequence.as_ref().map_or(0, |s| s.values.len())
}

/// # Safety
/// `sequence` must be null or come from [`envc_decode`]; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn envc_sequence_free(sequence: *mut EnvcSequence) {
    if !sequence.is_null() {
        drop(Box::from_raw(sequence));
    }
}

/// Regret upper bound in bits for the power-law envelope `1 ∧ c·k^{-alpha}`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn envc_regret_upper_powerlaw(alpha: f64, c: f64, n: u64, out: *mut f64) -> EnvcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(EnvcStatus::NullPointer);
        }
        *out = lift(regret_upper_bound(&Envelope::PowerLaw { alpha, c }, n))?.value;
        Ok(())
    })
}

/// Lower and upper leading redundancy terms in bits for the power-law class.
/// `lower_valid` is set to 0 when the lower bound's preconditions fail.
///
/// # Safety
/// All output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn envc_powerlaw_bounds(
    alpha: f64,
    c: f64,
    n: u64,
    lower: *mut f64,
    upper: *mut f64,
    lower_valid: *mut i32,
) -> EnvcStatus {
    guarded(|| {
        if lower.is_null() || upper.is_null() || lower_valid.is_null() {
            return Err(EnvcStatus::NullPointer);
        }
        let (lo, hi) = lift(powerlaw_bounds(alpha, c, n))?;
        *lower = lo.value;
        *upper = hi.value;
        *lower_valid = i32::from(lo.valid);
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn envc_status_message(status: EnvcStatus) -> *const c_char {
    let text: &'static CStr = match status {
        EnvcStatus::Ok => c"ok",
        EnvcStatus::NullPointer => c"null pointer argument",
        EnvcStatus::Domain => c"argument outside the operation's domain",
        EnvcStatus::Decode => c"corrupt or truncated payload",
        EnvcStatus::Format => c"malformed container header",
        EnvcStatus::Resource => c"size or arithmetic limit exceeded",
        EnvcStatus::Io => c"i/o failure",
        EnvcStatus::Internal => c"internal error",
    };
    text.as_ptr()
}

/// Library version as a NUL-terminated string.
#[no_mangle]
pub extern "C" fn envc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
