//! C ABI over `charsum-core`.
//!
//! Every fallible function returns a [`CharsumStatus`] and writes results through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`charsum_last_error`]. Handles are opaque and must be released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use charsum_core::character::{CompositeCharacter, PrimeCharacter};
use charsum_core::complete_sums::frak_s;
use charsum_core::delta::DeltaApproximator;
use charsum_core::experiments::{bound_ratio, delta_max, theta_region_check, validate_range, Window};
use charsum_core::lfunction::{l_half_hurwitz, l_half_smoothed};
use charsum_core::smooth_sums::{pipeline_reconstruct, s_chi, Instance, PipelineOptions, PipelineTrace};
use charsum_core::weights::SmoothWeight;
use charsum_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharsumStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotOddPrime = 3,
    NotCoprime = 4,
    PrincipalCharacter = 5,
    DegenerateNormalization = 6,
    SizeCondition = 7,
    Tolerance = 8,
    Numerical = 9,
    Panic = 10,
}

/// Complex number laid out as two doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CharsumComplex {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for CharsumComplex {
    fn from(z: num_complex::Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Dirichlet character modulo a product of distinct odd primes.
pub struct CharsumCharacter(CompositeCharacter);

/// Smoothed delta-symbol approximation with fixed `Q` and `K`.
pub struct CharsumDelta(DeltaApproximator);

/// Step-by-step reconstruction of one smooth sum.
pub struct CharsumTrace(PipelineTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CharsumStatus {
    match e {
        Error::NotOddPrime(_) => CharsumStatus::NotOddPrime,
        Error::NotCoprime(..) | Error::NotInvertible { .. } => CharsumStatus::NotCoprime,
        Error::PrincipalCharacter => CharsumStatus::PrincipalCharacter,
        Error::DegenerateNormalization(_) => CharsumStatus::DegenerateNormalization,
        Error::SizeCondition(_) => CharsumStatus::SizeCondition,
        Error::Tolerance { .. } => CharsumStatus::Tolerance,
        Error::QuadratureNoConvergence { .. } => CharsumStatus::Numerical,
        Error::InvalidArgument(_) | Error::BadExponent { .. } | Error::ZeroPolynomial | Error::Io(_) => {
            CharsumStatus::InvalidArgument
        }
    }
}

fn guard<F>(f: F) -> CharsumStatus
where
    F: FnOnce() -> Result<(), CharsumStatus>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CharsumStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CharsumStatus::Panic
        }
    }
}

fn fail(e: Error) -> CharsumStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn invalid(msg: &str) -> CharsumStatus {
    set_error(msg.to_string());
    CharsumStatus::InvalidArgument
}

fn null(name: &str) -> CharsumStatus {
    set_error(format!("null pointer: {name}"));
    CharsumStatus::NullPointer
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, CharsumStatus> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, CharsumStatus> {
    p.as_ref().ok_or_else(|| null(name))
}

/// Message for the last failure on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn charsum_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn charsum_status_name(status: CharsumStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        CharsumStatus::Ok => b"ok\0",
        CharsumStatus::NullPointer => b"null_pointer\0",
        CharsumStatus::InvalidArgument => b"invalid_argument\0",
        CharsumStatus::NotOddPrime => b"not_odd_prime\0",
        CharsumStatus::NotCoprime => b"not_coprime\0",
        CharsumStatus::PrincipalCharacter => b"principal_character\0",
        CharsumStatus::DegenerateNormalization => b"degenerate_normalization\0",
        CharsumStatus::SizeCondition => b"size_condition\0",
        CharsumStatus::Tolerance => b"tolerance\0",
        CharsumStatus::Numerical => b"numerical\0",
        CharsumStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}

/// Builds the character `∏ χ_{p_i}^{k_i}` where `χ_p` sends the smallest primitive root to `e(1/(p−1))`.
///
/// # Safety
/// `primes` and `exponents` must point to `len` readable values; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_character_new(
    primes: *const u64,
    exponents: *const u64,
    len: usize,
    out_handle: *mut *mut CharsumCharacter,
) -> CharsumStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        if len == 0 {
            return Err(invalid("at least one prime is required"));
        }
        if primes.is_null() {
            return Err(null("primes"));
        }
        if exponents.is_null() {
            return Err(null("exponents"));
        }
        let ps = std::slice::from_raw_parts(primes, len);
        let ks = std::slice::from_raw_parts(exponents, len);
        let parts: Vec<(u64, u64)> = ps.iter().copied().zip(ks.iter().copied()).collect();
        let chi = CompositeCharacter::from_exponents(&parts).map_err(fail)?;
        *slot = Box::into_raw(Box::new(CharsumCharacter(chi)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`charsum_character_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn charsum_character_free(h: *mut CharsumCharacter) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle or null; `out_modulus` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_character_modulus(h: *const CharsumCharacter, out_modulus: *mut u64) -> CharsumStatus {
    guard(|| {
        let chi = handle(h, "handle")?;
        *out(out_modulus, "out_modulus")? = chi.0.modulus();
        Ok(())
    })
}

/// Value `χ(n)`; any integer `n`, reduced internally.
///
/// # Safety
/// `h` must be a live handle or null; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_character_eval(
    h: *const CharsumCharacter,
    n: i64,
    out_value: *mut CharsumComplex,
) -> CharsumStatus {
    guard(|| {
        let chi = handle(h, "handle")?;
        *out(out_value, "out_value")? = chi.0.eval(n as i128).into();
        Ok(())
    })
}

/// Smooth sum `Σ χ(n) W(n/N)` with the standard weight supported in `[1, 2]`.
///
/// # Safety
/// `h` must be a live handle or null; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_character_smooth_sum(
    h: *const CharsumCharacter,
    n_size: f64,
    out_value: *mut CharsumComplex,
) -> CharsumStatus {
    guard(|| {
        let chi = handle(h, "handle")?;
        let slot = out(out_value, "out_value")?;
        if !(n_size.is_finite() && n_size > 0.0) {
            return Err(invalid("N must be positive and finite"));
        }
        *slot = s_chi(&chi.0, n_size, &SmoothWeight::w()).into();
        Ok(())
    })
}

/// `L(1/2, χ)` by Hurwitz zeta values, with the smoothed approximate functional
/// equation as a cross-check. `out_error_bar` receives the smoothed method's error bar
/// and `out_discrepancy` the distance between the two methods; either may be null.
///
/// # Safety
/// `h` must be a live handle or null; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_character_l_half(
    h: *const CharsumCharacter,
    out_value: *mut CharsumComplex,
    out_error_bar: *mut f64,
    out_discrepancy: *mut f64,
) -> CharsumStatus {
    guard(|| {
        let chi = handle(h, "handle")?;
        let slot = out(out_value, "out_value")?;
        let exact = l_half_hurwitz(&chi.0).map_err(fail)?;
        if !out_error_bar.is_null() || !out_discrepancy.is_null() {
            let smoothed = l_half_smoothed(&chi.0).map_err(fail)?;
            if let Some(e) = out_error_bar.as_mut() {
                *e = smoothed.error_bar;
            }
            if let Some(d) = out_discrepancy.as_mut() {
                *d = (smoothed.value - exact).norm();
            }
        }
        *slot = exact.into();
        Ok(())
    })
}

/// Complete sum `Σ_{x ∈ F_p*} χ(x) χ̄(m + x) e(nx/p)` for the character `χ_p^k`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_frak_s(p: u64, k: u64, m: i64, n: i64, out_value: *mut CharsumComplex) -> CharsumStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let chi = PrimeCharacter::new(p, k).map_err(fail)?;
        *slot = frak_s(&chi, m as i128, n as i128).into();
        Ok(())
    })
}

/// Delta-symbol approximation of size `Q` restricted to `n ≡ 0 mod K`.
///
/// # Safety
/// `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_delta_new(q_size: f64, k: u64, out_handle: *mut *mut CharsumDelta) -> CharsumStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        let d = DeltaApproximator::new(q_size, k).map_err(fail)?;
        *slot = Box::into_raw(Box::new(CharsumDelta(d)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`charsum_delta_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn charsum_delta_free(h: *mut CharsumDelta) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Approximation to `δ(n ≡ 0 mod K) · δ(n/K = 0)`.
///
/// # Safety
/// `h` must be a live handle or null; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_delta_eval(h: *const CharsumDelta, n: i64, out_value: *mut f64) -> CharsumStatus {
    guard(|| {
        let d = handle(h, "handle")?;
        *out(out_value, "out_value")? = d.0.delta_mod(n);
        Ok(())
    })
}

/// Checks the admissible range for `N` at moduli `(M₁, M₂, M₃)` with window constants
/// `c_lo ≤ c_hi`. `out_upper` may be null.
///
/// # Safety
/// Non-null out-pointers must be writable; `out_admissible` is required.
#[no_mangle]
pub unsafe extern "C" fn charsum_validate_range(
    m1: u64,
    m2: u64,
    m3: u64,
    n_size: f64,
    c_lo: f64,
    c_hi: f64,
    out_admissible: *mut bool,
    out_upper: *mut f64,
) -> CharsumStatus {
    guard(|| {
        let slot = out(out_admissible, "out_admissible")?;
        let report = validate_range(m1, m2, m3, n_size, Window { c_lo, c_hi }).map_err(fail)?;
        *slot = report.admissible;
        if let Some(u) = out_upper.as_mut() {
            *u = report.upper;
        }
        Ok(())
    })
}

/// `|S_χ(N)|` divided by the bound, for `χ = χ_{M₁}^{k₁} χ_{M₂}^{k₂} χ_{M₃}^{k₃}`.
/// Fails with `SizeCondition` when `N` lies outside the window.
///
/// # Safety
/// `moduli` and `exponents` must point to 3 readable values; `out_ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_bound_ratio(
    moduli: *const u64,
    exponents: *const u64,
    n_size: f64,
    c_lo: f64,
    c_hi: f64,
    out_ratio: *mut f64,
) -> CharsumStatus {
    guard(|| {
        let slot = out(out_ratio, "out_ratio")?;
        let m = read3(moduli, "moduli")?;
        let k = read3(exponents, "exponents")?;
        let rec = bound_ratio(m, k, n_size, Window { c_lo, c_hi }).map_err(fail)?;
        *slot = rec.ratio;
        Ok(())
    })
}

/// Checks the exponent region at `δ`; writes whether it holds and the largest admissible `δ`
/// (negative when none exists). `out_delta_max` may be null.
///
/// # Safety
/// Non-null out-pointers must be writable; `out_ok` is required.
#[no_mangle]
pub unsafe extern "C" fn charsum_theta_check(
    theta1: f64,
    theta2: f64,
    theta3: f64,
    delta: f64,
    out_ok: *mut bool,
    out_delta_max: *mut f64,
) -> CharsumStatus {
    guard(|| {
        let slot = out(out_ok, "out_ok")?;
        let theta = [theta1, theta2, theta3];
        let report = theta_region_check(theta, delta).map_err(fail)?;
        *slot = report.ok;
        if let Some(d) = out_delta_max.as_mut() {
            *d = delta_max(theta).map_err(fail)?;
        }
        Ok(())
    })
}

/// Runs the full reconstruction for one instance with default tolerances.
/// A trace is produced even when a step misses its tolerance; inspect it with
/// [`charsum_trace_ok`].
///
/// # Safety
/// `moduli` and `exponents` must point to 3 readable values; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_pipeline_run(
    moduli: *const u64,
    exponents: *const u64,
    n_size: f64,
    out_handle: *mut *mut CharsumTrace,
) -> CharsumStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        let m = read3(moduli, "moduli")?;
        let k = read3(exponents, "exponents")?;
        let inst = Instance::from_exponents(m, k, n_size).map_err(fail)?;
        let trace = pipeline_reconstruct(&inst, &PipelineOptions::default()).map_err(fail)?;
        *slot = Box::into_raw(Box::new(CharsumTrace(trace)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`charsum_pipeline_run`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn charsum_trace_free(h: *mut CharsumTrace) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Whether every step and halving check met its tolerance.
///
/// # Safety
/// `h` must be a live handle or null; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_trace_ok(h: *const CharsumTrace, out_ok: *mut bool) -> CharsumStatus {
    guard(|| {
        let t = handle(h, "handle")?;
        *out(out_ok, "out_ok")? = t.0.ok();
        Ok(())
    })
}

/// Direct sum, main term, and the largest relative step residual.
///
/// # Safety
/// `h` must be a live handle or null; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn charsum_trace_values(
    h: *const CharsumTrace,
    out_direct: *mut CharsumComplex,
    out_main_term: *mut CharsumComplex,
    out_max_relative_residual: *mut f64,
) -> CharsumStatus {
    guard(|| {
        let t = &handle(h, "handle")?.0;
        if let Some(d) = out_direct.as_mut() {
            *d = t.direct.into();
        }
        if let Some(m) = out_main_term.as_mut() {
            *m = t.main_term.into();
        }
        if let Some(r) = out_max_relative_residual.as_mut() {
            *r = t.residuals.iter().map(|s| s.relative).fold(0.0, f64::max);
        }
        Ok(())
    })
}

unsafe fn read3(p: *const u64, name: &str) -> Result<[u64; 3], CharsumStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok([s[0], s[1], s[2]])
}
