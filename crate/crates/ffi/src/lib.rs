//! C ABI over the `nbue` crate.
//!
//! Every function returns an [`NbueStatus`] and writes results through out
//! pointers. On failure a description is available from
//! [`nbue_last_error_message`] on the same thread. Status codes match the
//! exit codes of the `nbue` command-line tool.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nbue::exact::{ExactNullCdf, PrecisionPolicy};
use nbue::montecarlo::{sample_null_statistics, simulated_critical_values, SimConfig};
use nbue::statistic::{gamma_star_order_form, ScaleName, StatisticVariant};
use nbue::{Error, Sample};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbueStatus {
    Ok = 0,
    InvalidArgument = 1,
    DataError = 2,
    NumericalFailure = 3,
    MissingExternalTable = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbueVariant {
    /// `gamma_j*` with the `j` passed alongside.
    Generalized = 0,
    /// Historical Hollander-Proschan `K*`; `j` is ignored.
    Hp1975 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbueScale {
    None = 0,
    /// `1.25 sqrt(1.5 n)`
    PaperJQuarter = 1,
    /// `sqrt(12 n)`
    PaperJOne = 2,
    /// `c sqrt(n)` with a caller-supplied `c`
    User = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbueCdfValue {
    pub p: f64,
    pub achieved_bits: usize,
    pub estimated_abs_error: f64,
}

/// Opaque handle to an exact null CDF.
pub struct NbueExactCdf {
    inner: ExactNullCdf,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> NbueStatus {
    match e {
        Error::MissingExternalTable(_) => NbueStatus::MissingExternalTable,
        e if e.is_numerical() => NbueStatus::NumericalFailure,
        Error::EmptyOrSingleton(_)
        | Error::NegativeValue { .. }
        | Error::NonFiniteValue { .. }
        | Error::AllZero
        | Error::Parse { .. }
        | Error::ExternalTable { .. }
        | Error::Io(_) => NbueStatus::DataError,
        _ => NbueStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Small { needed: usize, got: usize },
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NbueStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NbueStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            NbueStatus::NullPointer
        }
        Ok(Err(Failure::Small { needed, got })) => {
            set_last_error(format!("output buffer holds {got} values, {needed} needed"));
            NbueStatus::BufferTooSmall
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            NbueStatus::Panic
        }
    }
}

fn variant_of(variant: NbueVariant, j: f64) -> StatisticVariant {
    match variant {
        NbueVariant::Generalized => StatisticVariant::Generalized(j),
        NbueVariant::Hp1975 => StatisticVariant::Hp1975,
    }
}

fn scale_of(scale: NbueScale, user_constant: f64) -> ScaleName {
    match scale {
        NbueScale::None => ScaleName::None,
        NbueScale::PaperJQuarter => ScaleName::PaperJQuarter,
        NbueScale::PaperJOne => ScaleName::PaperJOne,
        NbueScale::User => ScaleName::User(user_constant),
    }
}

unsafe fn slice_in<'a>(
    ptr: *const f64,
    len: usize,
    what: &'static str,
) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_out<'a>(
    ptr: *mut f64,
    len: usize,
    needed: usize,
    what: &'static str,
) -> Result<&'a mut [f64], Failure> {
    if len < needed {
        return Err(Failure::Small { needed, got: len });
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, needed))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn sample_from(values: *const f64, len: usize) -> Result<Sample, Failure> {
    let values = slice_in(values, len, "values")?;
    Ok(Sample::new(values.to_vec())?)
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nbue_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nbue_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The scale-invariant statistic of a sample.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn nbue_gamma_star(
    values: *const f64,
    len: usize,
    variant: NbueVariant,
    j: f64,
    out: *mut f64,
) -> NbueStatus {
    guard(|| {
        let s = sample_from(values, len)?;
        let g = nbue::gamma_star(&s, variant_of(variant, j))?;
        write(out, g, "out")
    })
}

/// `gamma_j*` through the order-statistic form; agrees with
/// [`nbue_gamma_star`] up to rounding.
///
/// # Safety
/// As for [`nbue_gamma_star`].
#[no_mangle]
pub unsafe extern "C" fn nbue_gamma_star_order_form(
    values: *const f64,
    len: usize,
    j: f64,
    out: *mut f64,
) -> NbueStatus {
    guard(|| {
        let s = sample_from(values, len)?;
        write(out, gamma_star_order_form(&s, j)?, "out")
    })
}

/// Barlow's total-time-on-test statistic.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn nbue_ttt_statistic(
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> NbueStatus {
    guard(|| {
        let s = sample_from(values, len)?;
        write(out, s.ttt_statistic(), "out")
    })
}

/// Normalized spacings of the sample, `len` values.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to `out_len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nbue_spacings(
    values: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> NbueStatus {
    guard(|| {
        let s = sample_from(values, len)?;
        let (_, d) = s.order_and_space();
        slice_out(out, out_len, len, "out")?.copy_from_slice(d.as_slice());
        Ok(())
    })
}

/// The `n` weights `e_k` for exponent `j`.
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nbue_coefficients(
    n: usize,
    j: f64,
    out: *mut f64,
    out_len: usize,
) -> NbueStatus {
    guard(|| {
        let c = nbue::coefficients(n, j)?;
        slice_out(out, out_len, n, "out")?.copy_from_slice(c.as_slice());
        Ok(())
    })
}

/// Multiplies `value` by the named scale factor for sample size `n`.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn nbue_scale(
    value: f64,
    n: usize,
    scale: NbueScale,
    user_constant: f64,
    out: *mut f64,
) -> NbueStatus {
    guard(|| {
        let v = nbue::scale(value, n, scale_of(scale, user_constant))?;
        write(out, v.scaled, "out")
    })
}

/// Creates an exact CDF with the default precision policy. Free it with
/// [`nbue_exact_cdf_free`].
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn nbue_exact_cdf_new(
    n: usize,
    variant: NbueVariant,
    j: f64,
    out: *mut *mut NbueExactCdf,
) -> NbueStatus {
    let p = PrecisionPolicy::default();
    nbue_exact_cdf_new_with_policy(
        n,
        variant,
        j,
        p.initial_bits,
        p.max_bits,
        p.agreement_tol,
        p.max_n,
        out,
    )
}

/// Creates an exact CDF with an explicit precision ladder and size cap.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nbue_exact_cdf_new_with_policy(
    n: usize,
    variant: NbueVariant,
    j: f64,
    initial_bits: usize,
    max_bits: usize,
    agreement_tol: f64,
    max_n: usize,
    out: *mut *mut NbueExactCdf,
) -> NbueStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let policy = PrecisionPolicy {
            initial_bits,
            max_bits,
            agreement_tol,
            max_n,
        };
        let inner = ExactNullCdf::with_policy(n, variant_of(variant, j), policy)?;
        out.write(Box::into_raw(Box::new(NbueExactCdf { inner })));
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `handle` must come from [`nbue_exact_cdf_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nbue_exact_cdf_free(handle: *mut NbueExactCdf) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbue_exact_cdf_eval(
    handle: *const NbueExactCdf,
    x: f64,
    out: *mut NbueCdfValue,
) -> NbueStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Failure::Null("handle"))?;
        let c = h.inner.cdf(x)?;
        write(
            out,
            NbueCdfValue {
                p: c.p,
                achieved_bits: c.achieved_bits,
                estimated_abs_error: c.estimated_abs_error,
            },
            "out",
        )
    })
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbue_exact_cdf_quantile(
    handle: *const NbueExactCdf,
    p: f64,
    out: *mut f64,
) -> NbueStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Failure::Null("handle"))?;
        write(out, h.inner.quantile(p)?, "out")
    })
}

/// # Safety
/// `handle` must be a live handle; `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn nbue_exact_cdf_support(
    handle: *const NbueExactCdf,
    lo: *mut f64,
    hi: *mut f64,
) -> NbueStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Failure::Null("handle"))?;
        let (a, b) = h.inner.support();
        write(lo, a, "lo")?;
        write(hi, b, "hi")
    })
}

/// `replications` null draws of the statistic, deterministic in `seed`.
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nbue_simulate_null(
    n: usize,
    variant: NbueVariant,
    j: f64,
    replications: usize,
    seed: u64,
    rate: f64,
    out: *mut f64,
    out_len: usize,
) -> NbueStatus {
    guard(|| {
        let cfg = SimConfig {
            rate,
            ..SimConfig::new(n, variant_of(variant, j), replications, seed)
        };
        let dst = slice_out(out, out_len, replications, "out")?;
        dst.copy_from_slice(&sample_null_statistics(&cfg)?);
        Ok(())
    })
}

/// Simulated critical values of the scaled statistic, one per alpha.
///
/// # Safety
/// `alphas` must point to `n_alphas` readable doubles and `out` to
/// `n_alphas` writable doubles.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nbue_simulated_critical_values(
    n: usize,
    variant: NbueVariant,
    j: f64,
    replications: usize,
    seed: u64,
    alphas: *const f64,
    n_alphas: usize,
    scale: NbueScale,
    user_constant: f64,
    out: *mut f64,
) -> NbueStatus {
    guard(|| {
        let alphas = slice_in(alphas, n_alphas, "alphas")?;
        let cfg = SimConfig::new(n, variant_of(variant, j), replications, seed);
        let values = simulated_critical_values(&cfg, alphas, scale_of(scale, user_constant))?;
        slice_out(out, n_alphas, n_alphas, "out")?.copy_from_slice(&values);
        Ok(())
    })
}
