//! C interface to `hypercong`.
//!
//! Every function returns an `HcStatus`; results go through out-pointers.
//! Big integers are written as NUL-terminated decimal strings into caller
//! buffers. The message for the last failure on the calling thread is
//! available from `hc_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use hypercong::field::FieldTable;
use hypercong::harness::{run_sweep, ClaimId, SweepConfig};
use hypercong::hyp_sums::{h_value_count, h_value_gauss_auto, SumCache};
use hypercong::hypergeom::{truncated_sum, unit_root_limit, HyperParams};
use hypercong::modular::{cm_coefficient, eta_expand, CmForm, EtaQuotient};
use hypercong::zeta::{compute_zeta, newton_polygon, unit_root_of_zeta, ZetaFactor, ZetaOptions};
use hypercong::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    BufferTooSmall = 3,
    NotAUnit = 4,
    TooLarge = 5,
    ZeroArgument = 6,
    PrecisionExceeded = 7,
    IntegralityFailure = 8,
    DegreeMismatch = 9,
    InsufficientData = 10,
    NoUnitRoot = 11,
    MultipleUnitRoots = 12,
    FactorMismatch = 13,
    ConsistencyFailure = 14,
    OutOfTable = 15,
    Io = 16,
    Panic = 17,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcMethod {
    Count = 0,
    Gauss = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcCmForm {
    D3Plus = 0,
    D3Minus = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcFormat {
    Json = 0,
    Csv = 1,
}

/// Finite field tables for `F_{p^k}`.
pub struct HcField {
    inner: Arc<FieldTable>,
}

/// An assembled zeta factor.
pub struct HcZeta {
    inner: ZetaFactor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::NotAUnit { .. } => HcStatus::NotAUnit,
        Error::InvalidInput(_) | Error::NonIntegral => HcStatus::InvalidArgument,
        Error::TooLarge { .. } => HcStatus::TooLarge,
        Error::ZeroArgument => HcStatus::ZeroArgument,
        Error::PrecisionExceeded { .. } => HcStatus::PrecisionExceeded,
        Error::IntegralityFailure { .. } => HcStatus::IntegralityFailure,
        Error::DegreeMismatch { .. } | Error::NonIntegralCoefficient { .. } => HcStatus::DegreeMismatch,
        Error::InsufficientData(_) => HcStatus::InsufficientData,
        Error::NoUnitRoot => HcStatus::NoUnitRoot,
        Error::MultipleUnitRoots(_) => HcStatus::MultipleUnitRoots,
        Error::FactorMismatch(_) => HcStatus::FactorMismatch,
        Error::ConsistencyFailure(_) => HcStatus::ConsistencyFailure,
        Error::OutOfTable { .. } => HcStatus::OutOfTable,
    }
}

/// Run `f`, mapping errors and panics to a status and the last-error message.
fn guard(f: impl FnOnce() -> Result<(), (HcStatus, String)>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside hypercong".into());
            HcStatus::Panic
        }
    }
}

fn lib<T>(r: hypercong::Result<T>) -> Result<T, (HcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{name} is NULL"))
}

/// Copy `s` plus a NUL into `buf`; `*needed` receives the full size.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (HcStatus, String)> {
    let size = s.len() + 1;
    if !needed.is_null() {
        *needed = size;
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < size {
        return Err((HcStatus::BufferTooSmall, format!("{size} bytes needed, {len} given")));
    }
    std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, (HcStatus, String)> {
    if s.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (HcStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn to_i64(v: i128) -> Result<i64, (HcStatus, String)> {
    i64::try_from(v).map_err(|_| (HcStatus::TooLarge, format!("{v} does not fit in int64_t")))
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// `F_{p^s}(z) mod p^k`, symmetric representative in decimal.
///
/// # Safety
/// `buf` must point to `len` writable bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_truncated_sum(
    d: u32,
    p: u64,
    s: u32,
    z: i64,
    k: u32,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> HcStatus {
    guard(|| {
        let v = lib(HyperParams::new(d, p).and_then(|hp| truncated_sum(hp, s, z, k)))?;
        write_str(&v.value.symmetric().to_string(), buf, len, needed)
    })
}

/// Unit root `F_{p^n}(z) / F_{p^(n-1)}(z) mod p^n`, symmetric representative.
///
/// # Safety
/// `buf` must point to `len` writable bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_unit_root_limit(
    d: u32,
    p: u64,
    z: i64,
    n: u32,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> HcStatus {
    guard(|| {
        let v = lib(HyperParams::new(d, p).and_then(|hp| unit_root_limit(hp, z, n)))?;
        write_str(&v.residue().symmetric().to_string(), buf, len, needed)
    })
}

/// Build the tables for `F_{p^k}`.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with `hc_field_free`.
#[no_mangle]
pub unsafe extern "C" fn hc_field_new(p: u64, k: u32, out: *mut *mut HcField) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = lib(FieldTable::build(p, k))?;
        *out = Box::into_raw(Box::new(HcField { inner: Arc::new(f) }));
        Ok(())
    })
}

/// # Safety
/// `field` must come from `hc_field_new` and not be freed already; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn hc_field_free(field: *mut HcField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `q = p^k`.
///
/// # Safety
/// `field` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_field_order(field: *const HcField, out: *mut u64) -> HcStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = f.inner.q();
        Ok(())
    })
}

/// Index of the chosen generator.
///
/// # Safety
/// `field` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_field_generator(field: *const HcField, out: *mut u64) -> HcStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = f.inner.generator();
        Ok(())
    })
}

/// Discrete logarithm of the element with index `x` to the generator.
///
/// # Safety
/// `field` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_field_dlog(field: *const HcField, x: u64, out: *mut u64) -> HcStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if x >= f.inner.q() {
            return Err((HcStatus::InvalidArgument, format!("index {x} is not below q = {}", f.inner.q())));
        }
        *out = lib(f.inner.dlog(x))?;
        Ok(())
    })
}

/// `H_q(t)` for the element with index `t`.
///
/// # Safety
/// `field` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_h_value(
    field: *const HcField,
    d: u32,
    t: u64,
    method: HcMethod,
    out: *mut i64,
) -> HcStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if t >= f.inner.q() {
            return Err((HcStatus::InvalidArgument, format!("index {t} is not below q = {}", f.inner.q())));
        }
        let h = match method {
            HcMethod::Count => lib(h_value_count(f.inner.clone(), d, t))?,
            HcMethod::Gauss => lib(h_value_gauss_auto(f.inner.clone(), d, t))?,
        };
        *out = to_i64(h.value)?;
        Ok(())
    })
}

/// Assemble `Z_p(t, T)`.
///
/// # Safety
/// `out` must be valid; the handle is released with `hc_zeta_free`.
#[no_mangle]
pub unsafe extern "C" fn hc_zeta_compute(p: u64, d: u32, t: i64, out: *mut *mut HcZeta) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = ZetaOptions::default();
        let z = lib(compute_zeta(&SumCache::new(opts.max_q), p, d, t, opts))?;
        *out = Box::into_raw(Box::new(HcZeta { inner: z }));
        Ok(())
    })
}

/// # Safety
/// `zeta` must come from `hc_zeta_compute` and not be freed already; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn hc_zeta_free(zeta: *mut HcZeta) {
    if !zeta.is_null() {
        drop(Box::from_raw(zeta));
    }
}

/// Degree of the reported polynomial.
///
/// # Safety
/// `zeta` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_zeta_degree(zeta: *const HcZeta, out: *mut usize) -> HcStatus {
    guard(|| {
        let z = zeta.as_ref().ok_or_else(|| null("zeta"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = z.inner.degree();
        Ok(())
    })
}

/// Coefficient of `T^i` in decimal.
///
/// # Safety
/// `zeta` must be valid and `buf` must point to `len` writable bytes;
/// `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_zeta_coefficient(
    zeta: *const HcZeta,
    i: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> HcStatus {
    guard(|| {
        let z = zeta.as_ref().ok_or_else(|| null("zeta"))?;
        let c = z
            .inner
            .coefficients
            .get(i)
            .ok_or_else(|| (HcStatus::InvalidArgument, format!("index {i} exceeds degree {}", z.inner.degree())))?;
        write_str(&c.to_string(), buf, len, needed)
    })
}

/// Newton slopes with repetition, comma-separated (`"0,1,4,5"`).
///
/// # Safety
/// `zeta` must be valid and `buf` must point to `len` writable bytes;
/// `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_zeta_slopes(
    zeta: *const HcZeta,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> HcStatus {
    guard(|| {
        let z = zeta.as_ref().ok_or_else(|| null("zeta"))?;
        let s: Vec<String> = newton_polygon(&z.inner).multiset().iter().map(|r| r.to_string()).collect();
        write_str(&s.join(","), buf, len, needed)
    })
}

/// Unit reciprocal root mod `p^n`, symmetric representative.
///
/// # Safety
/// `zeta` must be valid and `buf` must point to `len` writable bytes;
/// `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_zeta_unit_root(
    zeta: *const HcZeta,
    n: u32,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> HcStatus {
    guard(|| {
        let z = zeta.as_ref().ok_or_else(|| null("zeta"))?;
        let u = lib(unit_root_of_zeta(&z.inner, n))?;
        write_str(&u.residue().symmetric().to_string(), buf, len, needed)
    })
}

/// `a_1..a_n` of an eta quotient such as `"2^4 4^4"` into `out[0..n]`.
///
/// # Safety
/// `quotient` must be a NUL-terminated string and `out` must point to `n`
/// writable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn hc_eta_coefficients(quotient: *const c_char, n: usize, out: *mut i64) -> HcStatus {
    guard(|| {
        let q: EtaQuotient = lib(read_str(quotient, "quotient")?.parse())?;
        if out.is_null() {
            return Err(null("out"));
        }
        let e = lib(eta_expand(&q, n))?;
        let vals = e.coefficients.iter().map(|&v| to_i64(v)).collect::<Result<Vec<_>, _>>()?;
        std::ptr::copy_nonoverlapping(vals.as_ptr(), out, vals.len());
        Ok(())
    })
}

/// CM closed form at `p`; 0 when `p` has no representation.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_cm_coefficient(form: HcCmForm, p: u64, out: *mut i64) -> HcStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let f = match form {
            HcCmForm::D3Plus => CmForm::D3Plus,
            HcCmForm::D3Minus => CmForm::D3Minus,
        };
        *out = lib(cm_coefficient(f, p))?;
        Ok(())
    })
}

/// Run a sweep over `claims` (comma-separated ids or `"all"`) and write the
/// report to `out_path`. `exit_code` receives 0, 1 (a proved claim failed)
/// or 3 (internal consistency failure). `jobs = 0` uses all cores.
///
/// # Safety
/// `claims` and `out_path` must be NUL-terminated strings; `exit_code` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_verify(
    claims: *const c_char,
    pmax: u64,
    jobs: usize,
    out_path: *const c_char,
    format: HcFormat,
    exit_code: *mut i32,
) -> HcStatus {
    guard(|| {
        let claims = lib(ClaimId::parse_list(read_str(claims, "claims")?))?;
        let path = read_str(out_path, "out_path")?;
        let exit_code = exit_code.as_mut().ok_or_else(|| null("exit_code"))?;
        let cfg = SweepConfig { claims, pmax, jobs: (jobs > 0).then_some(jobs), ..Default::default() };
        let report = lib(run_sweep(&cfg, &AtomicBool::new(false)))?;
        let io = |e: std::io::Error| (HcStatus::Io, format!("{path}: {e}"));
        match format {
            HcFormat::Json => std::fs::write(path, report.to_json() + "\n").map_err(io)?,
            HcFormat::Csv => report.write_csv(std::fs::File::create(path).map_err(io)?).map_err(io)?,
        }
        *exit_code = report.exit_code();
        Ok(())
    })
}
