//! C interface to metacav.
//!
//! Every entry point returns a [`MetacavStatus`]; on failure the message is
//! kept per thread and read with [`metacav_last_error`]. Handles are opaque
//! and released with their `_free` function. Panics are caught at the
//! boundary and reported as `METACAV_STATUS_PANIC`.

use metacav::cli::ModelFile;
use metacav::diskmodel::{resonances_disk, stability_ratio, DiskConfig};
use metacav::geometry::{build_curve, PermittivityProfile};
use metacav::rootfind::SearchRegion;
use metacav::specfun;
use metacav::wkb::{plasmon_intervals, quasi_resonance_coeffs, WkbExpansion, WkbOptions};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetacavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Disk of radius R with constant permittivity, observation radius ρ and
/// Fourier cutoff M.
pub struct MetacavDisk(DiskConfig);

/// WKB expansion on a curve described by a JSON model.
pub struct MetacavExpansion(WkbExpansion);

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: impl std::fmt::Display) {
    LAST_ERROR.with(|e| {
        let mut v = msg.to_string().into_bytes();
        v.retain(|&b| b != 0);
        *e.borrow_mut() = v;
    });
}

fn guard<F: FnOnce() -> Result<(), (MetacavStatus, String)>>(f: F) -> MetacavStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            MetacavStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside metacav");
            MetacavStatus::Panic
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> (MetacavStatus, String) {
    (MetacavStatus::InvalidArgument, e.to_string())
}

fn numerical(e: impl std::fmt::Display) -> (MetacavStatus, String) {
    (MetacavStatus::Numerical, e.to_string())
}

fn null(name: &str) -> (MetacavStatus, String) {
    (MetacavStatus::NullPointer, format!("{name} is null"))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (MetacavStatus, String)> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn write(p: *mut f64, vals: &[f64], name: &str) -> Result<(), (MetacavStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    std::ptr::copy_nonoverlapping(vals.as_ptr(), p, vals.len());
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn metacav_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn metacav_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

type Bessel = fn(i32, Complex64) -> Result<specfun::BesselPair, specfun::SpecFunError>;

unsafe fn bessel(f: Bessel, order: i32, re: f64, im: f64, value: *mut f64, derivative: *mut f64) -> MetacavStatus {
    guard(|| {
        let p = f(order, Complex64::new(re, im)).map_err(numerical)?;
        write(value, &[p.value.re, p.value.im], "value")?;
        if !derivative.is_null() {
            write(derivative, &[p.derivative.re, p.derivative.im], "derivative")?;
        }
        Ok(())
    })
}

/// J_m(z) and J_m′(z), each written as two doubles (re, im); `derivative`
/// may be null.
///
/// # Safety
/// `value` must be valid for two doubles; `derivative` null or valid for two.
#[no_mangle]
pub unsafe extern "C" fn metacav_bessel_j(order: i32, re: f64, im: f64, value: *mut f64, derivative: *mut f64) -> MetacavStatus {
    bessel(specfun::bessel_j, order, re, im, value, derivative)
}

/// I_m(z) and I_m′(z).
///
/// # Safety
/// As [`metacav_bessel_j`].
#[no_mangle]
pub unsafe extern "C" fn metacav_bessel_i(order: i32, re: f64, im: f64, value: *mut f64, derivative: *mut f64) -> MetacavStatus {
    bessel(specfun::bessel_i, order, re, im, value, derivative)
}

/// H⁽¹⁾_m(z) and its derivative.
///
/// # Safety
/// As [`metacav_bessel_j`].
#[no_mangle]
pub unsafe extern "C" fn metacav_hankel1(order: i32, re: f64, im: f64, value: *mut f64, derivative: *mut f64) -> MetacavStatus {
    bessel(specfun::hankel1, order, re, im, value, derivative)
}

/// ε must be negative; ρ > R.
///
/// # Safety
/// `handle` must be valid for writes. The handle is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn metacav_disk_new(radius: f64, eps: f64, rho: f64, truncation: usize, handle: *mut *mut MetacavDisk) -> MetacavStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        let cfg = DiskConfig::from_permittivity(radius, eps, rho, truncation).map_err(invalid)?;
        *h = Box::into_raw(Box::new(MetacavDisk(cfg)));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`metacav_disk_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn metacav_disk_free(handle: *mut MetacavDisk) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// N_{ε,ρ}(k) for a plane wave.
///
/// # Safety
/// `disk` must be a live handle and `ratio` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn metacav_disk_stability_ratio(disk: *const MetacavDisk, k: f64, ratio: *mut f64) -> MetacavStatus {
    guard(|| {
        let d = disk.as_ref().ok_or_else(|| null("disk"))?;
        *out(ratio, "ratio")? = stability_ratio(&d.0, k).map_err(numerical)?;
        Ok(())
    })
}

/// Roots ℓ of det M_m in the ℓ-rectangle, written to `roots` as
/// interleaved (re, im). `count` receives the number found; if it exceeds `capacity`
/// only the first `capacity` are written and the status is
/// `METACAV_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// `roots` must be valid for 2·`capacity` doubles (or null with capacity 0);
/// `count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn metacav_disk_resonances(
    disk: *const MetacavDisk,
    m: i32,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    roots: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> MetacavStatus {
    guard(|| {
        let d = disk.as_ref().ok_or_else(|| null("disk"))?;
        let n = out(count, "count")?;
        if m < 0 {
            return Err(invalid(format!("mode index {m} must be non-negative")));
        }
        let region = SearchRegion::new(re_min, re_max, im_min, im_max).map_err(invalid)?;
        let set = resonances_disk(m, &d.0, &region).map_err(numerical)?;
        *n = set.records.len();
        if capacity > 0 && roots.is_null() {
            return Err(null("roots"));
        }
        for (i, r) in set.records.iter().take(capacity).enumerate() {
            *roots.add(2 * i) = r.ell.re;
            *roots.add(2 * i + 1) = r.ell.im;
        }
        if set.records.len() > capacity {
            return Err((MetacavStatus::BufferTooSmall, format!("{} roots, capacity {capacity}", set.records.len())));
        }
        Ok(())
    })
}

/// Builds the expansion through `order` from a JSON model
/// `{"geometry": {...}, "permittivity": {...}, "grid": n}`.
///
/// # Safety
/// `model_json` must be a NUL-terminated string; `handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn metacav_expansion_new(model_json: *const c_char, order: usize, handle: *mut *mut MetacavExpansion) -> MetacavStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        if model_json.is_null() {
            return Err(null("model_json"));
        }
        let text = CStr::from_ptr(model_json).to_str().map_err(invalid)?;
        let model: ModelFile = serde_json::from_str(text).map_err(invalid)?;
        let curve = build_curve(&model.geometry, model.grid).map_err(invalid)?;
        let profile = PermittivityProfile::from(model.permittivity);
        let e = WkbExpansion::build(&curve, &profile, &WkbOptions { order, conjugate: false }).map_err(|e| match e {
            metacav::wkb::WkbError::Hierarchy { .. } => numerical(e),
            _ => invalid(e),
        })?;
        *h = Box::into_raw(Box::new(MetacavExpansion(e)));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`metacav_expansion_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn metacav_expansion_free(handle: *mut MetacavExpansion) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of computed orders (N + 1).
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn metacav_expansion_orders(exp: *const MetacavExpansion) -> usize {
    exp.as_ref().map_or(0, |e| e.0.lambda.len())
}

/// λ_n.
///
/// # Safety
/// `exp` must be a live handle and `lambda` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn metacav_expansion_lambda(exp: *const MetacavExpansion, n: usize, lambda: *mut f64) -> MetacavStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("expansion"))?;
        let v = e.0.lambda.get(n).copied().ok_or_else(|| invalid(format!("order {n} not computed")))?;
        *out(lambda, "lambda")? = v;
        Ok(())
    })
}

/// Coefficients ℓ̆₀, ℓ̆₁, ℓ̆₂ of the quasi-resonance; `imaginary` is set to 1
/// when they describe |ℓ| on the positive imaginary axis.
///
/// # Safety
/// `exp` must be a live handle; `coeffs` valid for three doubles;
/// `imaginary` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn metacav_expansion_sqrt_coeffs(exp: *const MetacavExpansion, coeffs: *mut f64, imaginary: *mut i32) -> MetacavStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("expansion"))?;
        let q = quasi_resonance_coeffs(&e.0);
        write(coeffs, &q.ell, "coeffs")?;
        if let Some(i) = imaginary.as_mut() {
            *i = q.imaginary as i32;
        }
        Ok(())
    })
}

/// Plasmonic interval I_m = [a, b] and its centre ℓ̆(m).
///
/// # Safety
/// `exp` must be a live handle; `interval` valid for three doubles
/// (a, centre, b).
#[no_mangle]
pub unsafe extern "C" fn metacav_expansion_interval(exp: *const MetacavExpansion, m: i32, interval: *mut f64) -> MetacavStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("expansion"))?;
        let iv = plasmon_intervals(&e.0, &[m]).map_err(invalid)?[0];
        write(interval, &[iv.a, iv.center, iv.b], "interval")?;
        Ok(())
    })
}
