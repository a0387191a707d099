//! C interface to `rainbow-games`.
//!
//! Every function returns an [`RgStatus`]. On failure a message is kept per
//! thread and can be read with [`rg_last_error_message`]. Algebras are
//! opaque [`RgAlgebra`] handles released with [`rg_algebra_free`]; elements
//! cross the boundary as `uint64_t` bitsets over the atom indices.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rainbow_games::complex_algebra::{check_axioms, ComplexAlgebra};
use rainbow_games::fo_logic::{evaluate, parse_formula};
use rainbow_games::rainbow::{build_rainbow, RainbowParams};
use rainbow_games::ras::{load_ras, parse_ras};
use rainbow_games::seurat_game;
use rainbow_games::Element;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    InvalidStructure = 4,
    IoError = 5,
    Internal = 6,
}

/// A complex algebra over a finite atom structure.
pub struct RgAlgebra {
    inner: ComplexAlgebra,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_message(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: RgStatus, msg: impl ToString) -> RgStatus {
    set_message(msg);
    status
}

fn guard(f: impl FnOnce() -> RgStatus) -> RgStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(RgStatus::Internal, "panic inside rainbow-games"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, RgStatus> {
    if p.is_null() {
        return Err(fail(RgStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(RgStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn algebra<'a>(p: *const RgAlgebra) -> Result<&'a ComplexAlgebra, RgStatus> {
    p.as_ref().map(|a| &a.inner).ok_or_else(|| fail(RgStatus::NullPointer, "null algebra handle"))
}

unsafe fn store<T>(out: *mut T, v: T) -> RgStatus {
    if out.is_null() {
        return fail(RgStatus::NullPointer, "null output pointer");
    }
    *out = v;
    RgStatus::Ok
}

unsafe fn store_algebra(out: *mut *mut RgAlgebra, inner: ComplexAlgebra) -> RgStatus {
    store(out, Box::into_raw(Box::new(RgAlgebra { inner })))
}

fn element(alg: &ComplexAlgebra, bits: u64) -> Result<Element, RgStatus> {
    alg.element(bits).map_err(|e| fail(RgStatus::InvalidArgument, e))
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// The message for the last failed call on this thread (or the broken law
/// after [`rg_algebra_check_axioms`] reports `false`), or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds the rainbow algebra with `s` green and `t` red indices.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_rainbow_new(s: u32, t: u32, out: *mut *mut RgAlgebra) -> RgStatus {
    guard(|| {
        let p = attempt!(RainbowParams::new(s as usize, t as usize).map_err(|e| fail(RgStatus::InvalidArgument, e)));
        let st = attempt!(build_rainbow(p).map_err(|e| fail(RgStatus::InvalidArgument, e)));
        store_algebra(out, ComplexAlgebra::new(st))
    })
}

/// Loads a `.ras` file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_load_ras(path: *const c_char, out: *mut *mut RgAlgebra) -> RgStatus {
    guard(|| {
        let path = attempt!(text(path));
        match load_ras(Path::new(path)) {
            Ok(s) => store_algebra(out, ComplexAlgebra::new(s)),
            Err(e @ rainbow_games::ras::RasError::Io { .. }) => fail(RgStatus::IoError, e),
            Err(e @ rainbow_games::ras::RasError::Invalid(_)) => fail(RgStatus::InvalidStructure, e),
            Err(e) => fail(RgStatus::ParseError, e),
        }
    })
}

/// Parses `.ras` text held in memory.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_parse_ras(src: *const c_char, out: *mut *mut RgAlgebra) -> RgStatus {
    guard(|| {
        let src = attempt!(text(src));
        match parse_ras(src) {
            Ok(s) => store_algebra(out, ComplexAlgebra::new(s)),
            Err(e @ rainbow_games::ras::RasError::Invalid(_)) => fail(RgStatus::InvalidStructure, e),
            Err(e) => fail(RgStatus::ParseError, e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `alg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_free(alg: *mut RgAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Number of atoms, or 0 for a null handle.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_atom_count(alg: *const RgAlgebra) -> u32 {
    alg.as_ref().map_or(0, |a| a.inner.atom_count() as u32)
}

/// Sets `*ok` to whether the relation-algebra axioms hold. A failure message
/// naming the first broken law is left in the error slot when they do not.
///
/// # Safety
/// `alg` must be a live handle and `ok` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_check_axioms(alg: *const RgAlgebra, ok: *mut bool) -> RgStatus {
    guard(|| {
        let a = attempt!(algebra(alg));
        match check_axioms(a.structure()) {
            Ok(()) => store(ok, true),
            Err(vs) => {
                set_message(format!("{}: {}", vs[0].law.name(), vs[0].detail));
                store(ok, false)
            }
        }
    })
}

/// `*out = x ; y`.
///
/// # Safety
/// `alg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_compose(alg: *const RgAlgebra, x: u64, y: u64, out: *mut u64) -> RgStatus {
    guard(|| {
        let a = attempt!(algebra(alg));
        let (x, y) = (attempt!(element(a, x)), attempt!(element(a, y)));
        store(out, a.compose(x, y).bits())
    })
}

/// `*out = x˘`.
///
/// # Safety
/// `alg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_converse(alg: *const RgAlgebra, x: u64, out: *mut u64) -> RgStatus {
    guard(|| {
        let a = attempt!(algebra(alg));
        let x = attempt!(element(a, x));
        store(out, a.converse(x).bits())
    })
}

/// Evaluates a first-order sentence, e.g. `E x . ~(x = 0) & x;x = x`.
///
/// # Safety
/// `alg` must be a live handle, `formula` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_eval(alg: *const RgAlgebra, formula: *const c_char, out: *mut bool) -> RgStatus {
    guard(|| {
        let a = attempt!(algebra(alg));
        let f = attempt!(parse_formula(attempt!(text(formula))).map_err(|e| fail(RgStatus::ParseError, e)));
        let v = attempt!(evaluate(&f, a, &HashMap::new()).map_err(|e| fail(RgStatus::InvalidArgument, e)));
        store(out, v)
    })
}

/// For a rainbow algebra, whether it is predicted representable (`s <= t`).
///
/// # Safety
/// `alg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_algebra_predicted_representable(alg: *const RgAlgebra, out: *mut bool) -> RgStatus {
    guard(|| {
        let a = attempt!(algebra(alg));
        let Some(p) = RainbowParams::recognize(a.structure()) else {
            return fail(RgStatus::InvalidArgument, "not a rainbow algebra");
        };
        let v = attempt!(p.predicted_representable().map_err(|e| fail(RgStatus::InvalidArgument, e)));
        store(out, v)
    })
}

/// Solves the Seurat game `G_n(T, T')` with `|T| = t`, `|T'| = t2`; `*exists`
/// is true iff ∃ has a winning strategy.
///
/// # Safety
/// `exists` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_seurat_solve(t: u32, t2: u32, n: u32, exists: *mut bool) -> RgStatus {
    guard(|| {
        let (t, t2, n) = (t as usize, t2 as usize, n as usize);
        attempt!(seurat_game::SeuratPosition::new(t, t2, n).map_err(|e| fail(RgStatus::InvalidArgument, e)));
        store(exists, seurat_game::brute_force_winner(t, t2, n) == seurat_game::Winner::Exists)
    })
}
