#![allow(dead_code)]

//! Shared oracles and invariant checks for the integration and acceptance
//! tests.

use metacav::specfun::{self, ScaledPair};
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Uniform in the annulus r_min < |z| < r_max, |arg z| < arg_max.
pub fn random_z<R: Rng>(rng: &mut R, r_min: f64, r_max: f64, arg_max: f64) -> Complex64 {
    let r = rng.gen_range(r_min * r_min..r_max * r_max).sqrt();
    Complex64::from_polar(r, rng.gen_range(-arg_max..arg_max))
}

/// |a·d − b·e − w| relative to |a·d| + |b·e| for scaled pairs p = (a, b),
/// q = (e, d) with true Wronskian w; the exponents are carried in logs.
fn wronskian_error(p: &ScaledPair, q: &ScaledPair, w: Complex64) -> f64 {
    let terms = p.value * q.derivative - p.derivative * q.value;
    let size = (p.value * q.derivative).norm() + (p.derivative * q.value).norm();
    let e = p.exponent + q.exponent;
    let w_scaled = if e.abs() < 1000 { w * 2f64.powi(-(e as i32)) } else { c(0.0, 0.0) };
    (terms - w_scaled).norm() / size
}

/// J_m Y_m′ − J_m′ Y_m = 2/(πz).
pub fn wronskian_jy(m: i32, z: Complex64) -> f64 {
    let j = specfun::bessel_j_scaled(m, z).unwrap();
    let y = specfun::bessel_y_scaled(m, z).unwrap();
    wronskian_error(&j, &y, 2.0 / (std::f64::consts::PI * z))
}

/// I_m K_m′ − I_m′ K_m = −1/z.
pub fn wronskian_ik(m: i32, z: Complex64) -> f64 {
    let i = specfun::bessel_i_scaled(m, z).unwrap();
    let k = specfun::bessel_k_scaled(m, z).unwrap();
    wronskian_error(&i, &k, -1.0 / z)
}

/// J_m H_m′ − J_m′ H_m = 2i/(πz).
pub fn wronskian_jh(m: i32, z: Complex64) -> f64 {
    let j = specfun::bessel_j_scaled(m, z).unwrap();
    let h = specfun::hankel1_scaled(m, z).unwrap();
    wronskian_error(&j, &h, c(0.0, 2.0) / (std::f64::consts::PI * z))
}

#[derive(Clone, Copy, Debug)]
pub enum Family {
    J,
    I,
    H,
}

fn value(f: Family, m: i32, z: Complex64) -> Complex64 {
    match f {
        Family::J => specfun::bessel_j(m, z).unwrap().value,
        Family::I => specfun::bessel_i(m, z).unwrap().value,
        Family::H => specfun::hankel1(m, z).unwrap().value,
    }
}

fn pair(f: Family, m: i32, z: Complex64) -> specfun::BesselPair {
    match f {
        Family::J => specfun::bessel_j(m, z).unwrap(),
        Family::I => specfun::bessel_i(m, z).unwrap(),
        Family::H => specfun::hankel1(m, z).unwrap(),
    }
}

/// C_{m−1} ± C_{m+1} = (2m/z) C_m (minus sign for I), relative to the
/// largest term.
pub fn recurrence(f: Family, m: i32, z: Complex64) -> f64 {
    let (a, b, x) = (value(f, m - 1, z), value(f, m + 1, z), value(f, m, z));
    let rhs = x * (2.0 * m as f64) / z;
    let lhs = match f {
        Family::I => a - b,
        _ => a + b,
    };
    (lhs - rhs).norm() / a.norm().max(b.norm()).max(rhs.norm())
}

/// C_{−m} against (−1)^m C_m (I_{−m} = I_m), relative.
pub fn parity(f: Family, m: i32, z: Complex64) -> f64 {
    let s = match f {
        Family::I => 1.0,
        _ if m % 2 == 0 => 1.0,
        _ => -1.0,
    };
    let (a, b) = (value(f, -m, z), value(f, m, z) * s);
    (a - b).norm() / b.norm()
}

/// Central difference of the value (step 1e-6) against the returned
/// derivative, relative to max(|C′|, |C|).
pub fn derivative(f: Family, m: i32, z: Complex64) -> f64 {
    let h = 1e-6;
    let fd = (value(f, m, z + h) - value(f, m, z - h)) / (2.0 * h);
    let p = pair(f, m, z);
    (fd - p.derivative).norm() / p.derivative.norm().max(p.value.norm())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
