//! Radial mode profiles at a root and the leading-order surface-plasmon
//! approximation.

use super::{DiskConfig, Result};
use crate::specfun::{self, Scaled};
use num_complex::Complex64;

/// w_m(r) = I_m(ηℓr) for r < R and β H⁽¹⁾_m(ℓr) outside, with
/// β = I_m(ηℓR)/H⁽¹⁾_m(ℓR) so that w_m is continuous at R.
#[derive(Clone, Copy, Debug)]
pub struct ModeProfile {
    pub order: i32,
    pub eta: f64,
    pub radius: f64,
    pub ell: Complex64,
    beta: Scaled,
}

impl ModeProfile {
    pub fn beta(&self) -> Complex64 {
        self.beta.value()
    }

    /// Scaled w_m(r); use `.value()` or `.ln_abs()`.
    pub fn eval_scaled(&self, r: f64) -> Result<Scaled> {
        if r < self.radius {
            let p = specfun::bessel_i_scaled(self.order, self.ell * self.eta * r)?;
            Ok(p.value_scaled())
        } else {
            let p = specfun::hankel1_scaled(self.order, self.ell * r)?;
            Ok(self.beta * p.value_scaled())
        }
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        Ok(self.eval_scaled(r)?.value())
    }
}

pub fn mode_profile(m: i32, config: &DiskConfig, ell: Complex64) -> Result<ModeProfile> {
    config.validate()?;
    let z = ell * config.radius;
    let i = specfun::bessel_i_scaled(m, z * config.eta)?.value_scaled();
    let h = specfun::hankel1_scaled(m, z)?.value_scaled();
    Ok(ModeProfile {
        order: m,
        eta: config.eta,
        radius: config.radius,
        ell,
        beta: i / h,
    })
}

/// λ̲ = (m/R)²(1 − η⁻²) and w̲^±(r) = exp(−η^{∓1} m |r/R − 1|), with the
/// + branch outside the disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingOrder {
    pub order: i32,
    pub eta: f64,
    pub radius: f64,
    pub lambda: f64,
}

impl LeadingOrder {
    pub fn profile(&self, r: f64) -> f64 {
        let rate = if r >= self.radius { 1.0 / self.eta } else { self.eta };
        (-rate * self.order.abs() as f64 * (r / self.radius - 1.0).abs()).exp()
    }
}

pub fn leading_order_disk(m: i32, config: &DiskConfig) -> LeadingOrder {
    let mf = m as f64 / config.radius;
    LeadingOrder {
        order: m,
        eta: config.eta,
        radius: config.radius,
        lambda: mf * mf * (1.0 - 1.0 / (config.eta * config.eta)),
    }
}
