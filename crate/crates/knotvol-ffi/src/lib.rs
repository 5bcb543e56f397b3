//! C ABI over knotvol: opaque handles for contexts, Jones values and
//! holonomy representations, plain structs for small results, and status
//! codes with a thread-local error message.
//!
//! Every handle returned through an out-pointer must be released with its
//! matching `*_free` function; strings with [`kv_string_free`].

use knotvol::holonomy::{borromean_variant, build_rep_double, build_rep_whitehead, dpr_solve, export_domain, HolonomyData};
use knotvol::jones::{jones_with, JonesValue, KnotSpec, Precision};
use knotvol::potential::{saddle_double, saddle_whitehead};
use knotvol::qnum::RootOfUnityCtx;
use knotvol::volume::target_volume;
use knotvol::Error;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KvStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Numeric = 3,
    Branch = 4,
    Selection = 5,
    Usage = 6,
    Io = 7,
    Panic = 8,
}

/// Knot family selector for [`KvKnot`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KvFamily {
    Borromean = 0,
    B1 = 1,
    B11 = 2,
    Whitehead = 3,
    DoubleTwist = 4,
}

/// A knot: `p` is used by Whitehead and DoubleTwist, `r` by DoubleTwist.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KvKnot {
    pub family: KvFamily,
    pub p: i64,
    pub r: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KvComplex {
    pub re: f64,
    pub im: f64,
}

/// Vol + i·CS with CS in [0, π²).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KvComplexVolume {
    pub vol: f64,
    pub cs: f64,
}

/// Saddle point; `beta0` is ½ for the one-variable Whitehead potential.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KvSaddle {
    pub alpha0: KvComplex,
    pub beta0: KvComplex,
    pub u: KvComplex,
    pub v: KvComplex,
    pub volume: f64,
}

/// Precomputed tables for one N.
pub struct KvContext(RootOfUnityCtx);

/// One evaluated J_{N−1}(K).
pub struct KvJones(JonesValue);

/// A holonomy representation with its fixed points.
pub struct KvRep(HolonomyData);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KvStatus {
    match e {
        Error::Domain(_) => KvStatus::Domain,
        Error::Numeric(_) => KvStatus::Numeric,
        Error::Branch(_) => KvStatus::Branch,
        Error::Selection(_) => KvStatus::Selection,
        Error::Usage(_) => KvStatus::Usage,
        Error::Io(_) => KvStatus::Io,
    }
}

/// Run `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), KvStatus>) -> KvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KvStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            KvStatus::Panic
        }
    }
}

fn lift<T>(r: knotvol::Result<T>) -> Result<T, KvStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), KvStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(KvStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn spec(k: KvKnot) -> KnotSpec {
    match k.family {
        KvFamily::Borromean => KnotSpec::Borromean,
        KvFamily::B1 => KnotSpec::B1,
        KvFamily::B11 => KnotSpec::B11,
        KvFamily::Whitehead => KnotSpec::Whitehead(k.p),
        KvFamily::DoubleTwist => KnotSpec::DoubleTwist(k.p, k.r),
    }
}

fn cx(z: Complex64) -> KvComplex {
    KvComplex { re: z.re, im: z.im }
}

/// Message of the last failed call on this thread, or null. Free with
/// [`kv_string_free`].
#[no_mangle]
pub extern "C" fn kv_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Create the context for odd N ≥ 3.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_context_new(n: usize, out: *mut *mut KvContext) -> KvStatus {
    guard(|| {
        non_null(out, "out")?;
        let ctx = lift(RootOfUnityCtx::new(n))?;
        *out = Box::into_raw(Box::new(KvContext(ctx)));
        Ok(())
    })
}

/// # Safety
/// `ctx` must come from [`kv_context_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kv_context_free(ctx: *mut KvContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Evaluate J_{N−1}(K). `precision_bits`: 0 automatic, 53 plain double,
/// otherwise the MPFR precision of the twisted sums.
///
/// # Safety
/// `ctx` must be a live context and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_jones(ctx: *const KvContext, knot: KvKnot, precision_bits: u32, out: *mut *mut KvJones) -> KvStatus {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        let precision = match precision_bits {
            0 => Precision::Auto,
            53 => Precision::Double,
            b => Precision::Bits(b),
        };
        let v = lift(jones_with(&(*ctx).0, spec(knot), precision))?;
        *out = Box::into_raw(Box::new(KvJones(v)));
        Ok(())
    })
}

/// log J on the branch recorded by the evaluator.
///
/// # Safety
/// `v` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_jones_log(v: *const KvJones, out: *mut KvComplex) -> KvStatus {
    guard(|| {
        non_null(v, "value")?;
        non_null(out, "out")?;
        *out = cx((*v).0.log_branch);
        Ok(())
    })
}

/// J itself (may overflow to infinity for large N; prefer [`kv_jones_log`]).
///
/// # Safety
/// `v` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_jones_value(v: *const KvJones, out: *mut KvComplex) -> KvStatus {
    guard(|| {
        non_null(v, "value")?;
        non_null(out, "out")?;
        *out = cx((*v).0.to_complex());
        Ok(())
    })
}

/// Mantissa bits used for the sum.
///
/// # Safety
/// `v` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn kv_jones_precision_bits(v: *const KvJones) -> u32 {
    if v.is_null() {
        0
    } else {
        (*v).0.precision_bits
    }
}

/// # Safety
/// `v` must come from [`kv_jones`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kv_jones_free(v: *mut KvJones) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Complex volume of a Borromean-family link, W_p or D_{p,r}.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_volume(knot: KvKnot, out: *mut KvComplexVolume) -> KvStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = lift(target_volume(spec(knot)))?;
        *out = KvComplexVolume { vol: v.vol, cs: v.cs };
        Ok(())
    })
}

/// Geometric saddle point of the W_p or D_{p,r} potential.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_saddle(knot: KvKnot, out: *mut KvSaddle) -> KvStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = match spec(knot) {
            KnotSpec::Whitehead(p) => lift(saddle_whitehead(p))?,
            KnotSpec::DoubleTwist(p, r) => lift(saddle_double(p, r))?,
            k => {
                set_error(format!("no saddle problem for {k}"));
                return Err(KvStatus::Usage);
            }
        };
        *out = KvSaddle {
            alpha0: cx(s.alpha0),
            beta0: cx(s.beta0.unwrap_or(Complex64::new(0.5, 0.0))),
            u: cx(s.u),
            v: cx(s.v),
            volume: s.volume(),
        };
        Ok(())
    })
}

/// Build the geometric representation of K.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_rep_new(knot: KvKnot, out: *mut *mut KvRep) -> KvStatus {
    guard(|| {
        non_null(out, "out")?;
        let k = spec(knot);
        let data = lift(match k {
            KnotSpec::Borromean | KnotSpec::B1 | KnotSpec::B11 => borromean_variant(k),
            KnotSpec::Whitehead(p) => knotvol::holonomy::wp_geometric_u(p).and_then(|w| build_rep_whitehead(p, w.t)),
            KnotSpec::DoubleTwist(p, r) => dpr_solve(p, r).and_then(|s| build_rep_double(p, r, s.u, s.v, s.sqrt_disc)),
        })?;
        *out = Box::into_raw(Box::new(KvRep(data)));
        Ok(())
    })
}

/// Fixed point by label. `*is_infinite` is set when the point is ∞ (then
/// `out` is left untouched).
///
/// # Safety
/// `rep` must be live, `label` a NUL-terminated string, `out` and
/// `is_infinite` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kv_rep_fixed_point(rep: *const KvRep, label: *const c_char, out: *mut KvComplex, is_infinite: *mut bool) -> KvStatus {
    guard(|| {
        non_null(rep, "rep")?;
        non_null(label, "label")?;
        non_null(out, "out")?;
        non_null(is_infinite, "is_infinite")?;
        let name = CStr::from_ptr(label).to_string_lossy();
        match (*rep).0.fixed_point(&name) {
            Some(Some(z)) => {
                *out = cx(z);
                *is_infinite = false;
            }
            Some(None) => *is_infinite = true,
            None => {
                set_error(format!("no fixed point labelled {name:?}"));
                return Err(KvStatus::Domain);
            }
        }
        Ok(())
    })
}

/// Domain JSON (fixed points, axes, relation residuals). Free with
/// [`kv_string_free`]; null on failure.
///
/// # Safety
/// `rep` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kv_rep_to_json(rep: *const KvRep) -> *mut c_char {
    if rep.is_null() {
        set_error("rep is null".into());
        return ptr::null_mut();
    }
    catch_unwind(AssertUnwindSafe(|| {
        CString::new(export_domain(&(*rep).0).to_string()).map_or(ptr::null_mut(), CString::into_raw)
    }))
    .unwrap_or(ptr::null_mut())
}

/// # Safety
/// `rep` must come from [`kv_rep_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kv_rep_free(rep: *mut KvRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}
