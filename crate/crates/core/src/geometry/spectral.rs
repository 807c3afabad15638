//! Fourier operations on periodic functions sampled at n equispaced points
//! of [0, L). The Nyquist coefficient is dropped by every operator.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

fn forward(f: &[Complex64]) -> Vec<Complex64> {
    let mut buf = f.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let inv = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

fn inverse(mut c: Vec<Complex64>) -> Vec<Complex64> {
    FftPlanner::new().plan_fft_inverse(c.len()).process(&mut c);
    c
}

/// Signed wavenumber index of FFT slot k.
fn wavenumber(k: usize, n: usize) -> Option<f64> {
    if 2 * k == n {
        None
    } else if 2 * k < n {
        Some(k as f64)
    } else {
        Some(k as f64 - n as f64)
    }
}

/// Normalised Fourier coefficients c_k with f(s) = Σ c_k e^{2πik s/L}.
pub fn coefficients(f: &[Complex64]) -> Vec<Complex64> {
    forward(f)
}

pub fn derivative_c(f: &[Complex64], length: f64) -> Vec<Complex64> {
    let n = f.len();
    let w = 2.0 * PI / length;
    let mut c = forward(f);
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= match wavenumber(k, n) {
            Some(j) => Complex64::new(0.0, w * j),
            None => Complex64::new(0.0, 0.0),
        };
    }
    inverse(c)
}

pub fn derivative(f: &[f64], length: f64) -> Vec<f64> {
    derivative_c(&to_complex(f), length).iter().map(|z| z.re).collect()
}

/// s_j ↦ ∫₀^{s_j} f: the mean contributes ⟨f⟩ s_j, the oscillating part is
/// integrated mode by mode.
pub fn antiderivative_c(f: &[Complex64], length: f64) -> Vec<Complex64> {
    let n = f.len();
    let w = 2.0 * PI / length;
    let mut c = forward(f);
    let mean = c[0];
    c[0] = Complex64::new(0.0, 0.0);
    let mut offset = Complex64::new(0.0, 0.0);
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        match wavenumber(k, n) {
            Some(j) => {
                *ck /= Complex64::new(0.0, w * j);
                offset += *ck;
            }
            None => *ck = Complex64::new(0.0, 0.0),
        }
    }
    let periodic = inverse(c);
    periodic
        .iter()
        .enumerate()
        .map(|(j, p)| mean * (length * j as f64 / n as f64) + p - offset)
        .collect()
}

pub fn antiderivative(f: &[f64], length: f64) -> Vec<f64> {
    antiderivative_c(&to_complex(f), length).iter().map(|z| z.re).collect()
}

pub fn mean_c(f: &[Complex64]) -> Complex64 {
    f.iter().sum::<Complex64>() / f.len() as f64
}

pub fn mean(f: &[f64]) -> f64 {
    f.iter().sum::<f64>() / f.len() as f64
}

/// Trigonometric interpolant of the samples evaluated at arbitrary s.
pub fn interpolate_c(coeffs: &[Complex64], length: f64, s: f64) -> Complex64 {
    let n = coeffs.len();
    let w = 2.0 * PI / length;
    coeffs
        .iter()
        .enumerate()
        .filter_map(|(k, c)| wavenumber(k, n).map(|j| c * Complex64::from_polar(1.0, w * j * s)))
        .sum()
}

pub fn to_complex(f: &[f64]) -> Vec<Complex64> {
    f.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}
