//! C interface to `tvwalk`.
//!
//! Matrices and key pairs are opaque handles created and freed by this
//! library. Every fallible call returns a `TvStatus`; on failure the message
//! is available from `tv_last_error` on the same thread. Bit vectors cross
//! the boundary as arrays of `n` bytes, each 0 or 1.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;
use std::slice;

use tvwalk::exact::{self, GroupTable, TransitionStructure};
use tvwalk::gf2::{self, BitMatrix, BitVector, Transvection};
use tvwalk::protocol::{self, Challenge, KeyPair, Response, Role, Verdict};
use tvwalk::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    TooLarge = 4,
    Format = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvVerdict {
    Accept = 0,
    WrongAnswer = 1,
    TooSlow = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TvOpCount {
    pub bit_ops: u64,
    pub word_ops: u64,
}

/// Opaque square matrix over GF(2).
pub struct TvMatrix(BitMatrix);

/// Opaque public key plus the secret move list behind it.
pub struct TvKeyPair(KeyPair);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TvStatus {
    match e {
        Error::DimensionMismatch { .. } => TvStatus::DimensionMismatch,
        Error::KeyTooLarge { .. } | Error::GroupTooLarge { .. } => TvStatus::TooLarge,
        Error::Format(_) | Error::Io(_) => TvStatus::Format,
        Error::EigenNotConverged(_) | Error::SamplingExhausted(_) => TvStatus::Internal,
        _ => TvStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for `tv_last_error`.
fn guard<F: FnOnce() -> Result<(), (TvStatus, String)>>(f: F) -> TvStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TvStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TvStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (TvStatus, String)>;
}

impl<T> OrStatus<T> for tvwalk::Result<T> {
    fn or_status(self) -> Result<T, (TvStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (TvStatus, String) {
    (TvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TvStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (TvStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn bits_in(p: *const u8, n: usize) -> Result<BitVector, (TvStatus, String)> {
    if p.is_null() {
        return Err(null("bit array"));
    }
    let bytes = slice::from_raw_parts(p, n);
    if let Some(b) = bytes.iter().find(|&&b| b > 1) {
        return Err((
            TvStatus::InvalidArgument,
            format!("bit arrays hold 0 or 1, found {b}"),
        ));
    }
    Ok(BitVector::from_bits(
        &bytes.iter().map(|&b| b == 1).collect::<Vec<_>>(),
    ))
}

unsafe fn bits_out(v: &BitVector, p: *mut u8) -> Result<(), (TvStatus, String)> {
    if p.is_null() {
        return Err(null("output bit array"));
    }
    let dst = slice::from_raw_parts_mut(p, v.len());
    for (k, d) in dst.iter_mut().enumerate() {
        *d = u8::from(v.get(k));
    }
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `|GL_n(F_2)|`; fails with `TV_STATUS_TOO_LARGE` beyond 64 bits.
#[no_mangle]
pub unsafe extern "C" fn tv_group_order(n: u32, order: *mut u64) -> TvStatus {
    guard(|| {
        let order = out(order, "order")?;
        let value = gf2::group_order(n as usize)
            .and_then(|v| u64::try_from(v).ok())
            .ok_or((
                TvStatus::TooLarge,
                format!("group order for n = {n} exceeds 64 bits"),
            ))?;
        *order = value;
        Ok(())
    })
}

/// `|GL_n(F_2)| / 2^{n^2}`.
#[no_mangle]
pub extern "C" fn tv_invertible_fraction(n: u32) -> f64 {
    gf2::invertible_fraction(n as usize)
}

#[no_mangle]
pub unsafe extern "C" fn tv_matrix_identity(n: u32, matrix: *mut *mut TvMatrix) -> TvStatus {
    guard(|| {
        let slot = out(matrix, "matrix")?;
        if n == 0 {
            return Err((
                TvStatus::InvalidArgument,
                "dimension must be positive".into(),
            ));
        }
        *slot = Box::into_raw(Box::new(TvMatrix(BitMatrix::identity(n as usize))));
        Ok(())
    })
}

/// Parses the binary matrix file format from `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn tv_matrix_from_bytes(
    bytes: *const u8,
    len: usize,
    matrix: *mut *mut TvMatrix,
) -> TvStatus {
    guard(|| {
        let slot = out(matrix, "matrix")?;
        if bytes.is_null() {
            return Err(null("bytes"));
        }
        let m = BitMatrix::read_from(slice::from_raw_parts(bytes, len)).or_status()?;
        *slot = Box::into_raw(Box::new(TvMatrix(m)));
        Ok(())
    })
}

/// Serializes into `buf`. `*len` receives the required size; when `cap` is
/// too small nothing is written and `TV_STATUS_BUFFER_TOO_SMALL` is returned.
#[no_mangle]
pub unsafe extern "C" fn tv_matrix_to_bytes(
    matrix: *const TvMatrix,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> TvStatus {
    guard(|| {
        let m = deref(matrix, "matrix")?;
        let len = out(len, "len")?;
        let bytes = m.0.to_bytes();
        *len = bytes.len();
        if cap < bytes.len() {
            return Err((
                TvStatus::BufferTooSmall,
                format!("need {} bytes, have {cap}", bytes.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

/// Row-major key with bit `i*n + j` set for entry `(i, j)`; needs `n*n <= 64`.
#[no_mangle]
pub unsafe extern "C" fn tv_matrix_encode_key(matrix: *const TvMatrix, key: *mut u64) -> TvStatus {
    guard(|| {
        let m = deref(matrix, "matrix")?;
        *out(key, "key")? = m.0.encode_key().or_status()?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tv_matrix_decode_key(
    key: u64,
    n: u32,
    matrix: *mut *mut TvMatrix,
) -> TvStatus {
    guard(|| {
        let slot = out(matrix, "matrix")?;
        let m = BitMatrix::decode_key(key, n as usize).or_status()?;
        *slot = Box::into_raw(Box::new(TvMatrix(m)));
        Ok(())
    })
}

/// Dimension, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tv_matrix_dim(matrix: *const TvMatrix) -> u32 {
    matrix.as_ref().map_or(0, |m| m.0.n() as u32)
}

#[no_mangle]
pub unsafe extern "C" fn tv_matrix_get(
    matrix: *const TvMatrix,
    i: u32,
    j: u32,
    bit: *mut u8,
) -> TvStatus {
    guard(|| {
        let m = deref(matrix, "matrix")?;
        let n = m.0.n() as u32;
        if i >= n || j >= n {
            return Err((
                TvStatus::InvalidArgument,
                format!("entry ({i}, {j}) outside {n}x{n}"),
            ));
        }
        *out(bit, "bit")? = u8::from(m.0.get(i as usize, j as usize));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tv_matrix_rank(matrix: *const TvMatrix, rank: *mut u32) -> TvStatus {
    guard(|| {
        let m = deref(matrix, "matrix")?;
        *out(rank, "rank")? = m.0.rank() as u32;
        Ok(())
    })
}

/// Row `target` += row `source`.
#[no_mangle]
pub unsafe extern "C" fn tv_matrix_apply_transvection(
    matrix: *mut TvMatrix,
    target: u32,
    source: u32,
) -> TvStatus {
    guard(|| {
        let m = out(matrix, "matrix")?;
        let t = Transvection::new(target as usize, source as usize).or_status()?;
        m.0.apply_transvection_in_place(t).or_status()
    })
}

#[no_mangle]
pub unsafe extern "C" fn tv_matrix_free(matrix: *mut TvMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Runs the walk for `t` steps from the identity with the given seed.
#[no_mangle]
pub unsafe extern "C" fn tv_keygen(
    n: u32,
    t: u64,
    seed: u64,
    lazy: bool,
    keypair: *mut *mut TvKeyPair,
) -> TvStatus {
    guard(|| {
        let slot = out(keypair, "keypair")?;
        let kp = protocol::keygen_with(n as usize, t, seed, lazy).or_status()?;
        *slot = Box::into_raw(Box::new(TvKeyPair(kp)));
        Ok(())
    })
}

/// A fresh copy of the public key; free it with `tv_matrix_free`.
#[no_mangle]
pub unsafe extern "C" fn tv_keypair_public(
    keypair: *const TvKeyPair,
    matrix: *mut *mut TvMatrix,
) -> TvStatus {
    guard(|| {
        let kp = deref(keypair, "keypair")?;
        *out(matrix, "matrix")? = Box::into_raw(Box::new(TvMatrix(kp.0.public.clone())));
        Ok(())
    })
}

/// Non-held steps in the secret, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tv_keypair_move_count(keypair: *const TvKeyPair) -> u64 {
    keypair
        .as_ref()
        .map_or(0, |kp| kp.0.secret.move_count() as u64)
}

#[no_mangle]
pub unsafe extern "C" fn tv_keypair_free(keypair: *mut TvKeyPair) {
    if !keypair.is_null() {
        drop(Box::from_raw(keypair));
    }
}

/// Replays the secret moves on `x` (n bytes) and writes `A x` to `y`.
#[no_mangle]
pub unsafe extern "C" fn tv_respond_honest(
    keypair: *const TvKeyPair,
    x: *const u8,
    n: usize,
    y: *mut u8,
    ops: *mut TvOpCount,
) -> TvStatus {
    guard(|| {
        let kp = deref(keypair, "keypair")?;
        let c = Challenge { x: bits_in(x, n)? };
        let r = protocol::respond_honest(&kp.0, &c).or_status()?;
        bits_out(&r.y, y)?;
        if let Some(o) = ops.as_mut() {
            *o = TvOpCount {
                bit_ops: r.ops.bit_ops,
                word_ops: r.ops.word_ops,
            };
        }
        Ok(())
    })
}

/// Computes `A x` from the public key alone.
#[no_mangle]
pub unsafe extern "C" fn tv_respond_dishonest(
    public: *const TvMatrix,
    x: *const u8,
    n: usize,
    y: *mut u8,
    ops: *mut TvOpCount,
) -> TvStatus {
    guard(|| {
        let m = deref(public, "public")?;
        let c = Challenge { x: bits_in(x, n)? };
        let r = protocol::respond_dishonest(&m.0, &c).or_status()?;
        bits_out(&r.y, y)?;
        if let Some(o) = ops.as_mut() {
            *o = TvOpCount {
                bit_ops: r.ops.bit_ops,
                word_ops: r.ops.word_ops,
            };
        }
        Ok(())
    })
}

/// Accepts iff `y = A x` and `bit_ops <= deadline_ops`.
#[no_mangle]
pub unsafe extern "C" fn tv_verify(
    public: *const TvMatrix,
    x: *const u8,
    y: *const u8,
    n: usize,
    bit_ops: u64,
    deadline_ops: u64,
    verdict: *mut TvVerdict,
) -> TvStatus {
    guard(|| {
        let m = deref(public, "public")?;
        let verdict = out(verdict, "verdict")?;
        let c = Challenge { x: bits_in(x, n)? };
        let r = Response {
            y: bits_in(y, n)?,
            ops: gf2::OpCount {
                bit_ops,
                word_ops: 0,
            },
            role: Role::Honest,
        };
        *verdict = match protocol::verify(&m.0, &c, &r, deadline_ops) {
            Verdict::Accept => TvVerdict::Accept,
            Verdict::WrongAnswer => TvVerdict::WrongAnswer,
            Verdict::TooSlow => TvVerdict::TooSlow,
        };
        Ok(())
    })
}

/// Exact TV and l2 mixing times from the identity for `n <= 4`. A periodic
/// chain with `lazy` false fails with `TV_STATUS_INVALID_ARGUMENT`.
#[no_mangle]
pub unsafe extern "C" fn tv_mixing_times(
    n: u32,
    eps: f64,
    lazy: bool,
    t_tv: *mut u64,
    t_l2: *mut u64,
) -> TvStatus {
    guard(|| {
        let t_tv = out(t_tv, "t_tv")?;
        let t_l2 = out(t_l2, "t_l2")?;
        let gt = GroupTable::enumerate(n as usize).or_status()?;
        let ts = TransitionStructure::build(&gt).or_status()?;
        let mt = exact::mixing_times(&ts, eps, lazy, exact::DEFAULT_MAX_T).or_status()?;
        *t_tv = mt.tv;
        *t_l2 = mt.l2;
        Ok(())
    })
}
