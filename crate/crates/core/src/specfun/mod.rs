//! Complex-argument Bessel kernel.
//!
//! Integer orders |m| ≤ 256. J_m uses the ascending series when
//! |z|² ≤ 2(m+1) and Miller's backward recurrence otherwise; I_m(z) =
//! i^{−m} J_m(iz). H⁽¹⁾_m is built from the modified function K_m through
//! H⁽¹⁾_m(w) = (2/π) i^{−(m+1)} K_m(−iw) in the closed upper half-plane and
//! reflected below it. K_0, K_1 come from the logarithmic series (|z| ≤ 2)
//! or Steed's continued fraction, then forward recurrence.
//!
//! Every entry point has a `_scaled` twin returning mantissas with a shared
//! binary exponent; these never overflow. The plain versions return
//! [`SpecFunError::Overflow`] once a value leaves the `f64` range
//! (roughly |value| > 1e308).

mod jfun;
mod kfun;
pub mod scaled;

pub use scaled::Scaled;

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported |order|.
pub const MAX_ORDER: i32 = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("order {0} outside the supported range |m| <= 256")]
    OrderOutOfRange(i32),
    #[error("argument {0} lies on the branch cut (negative real axis)")]
    BranchCut(Complex64),
    #[error("function is singular at z = 0")]
    Singular,
    #[error("argument is not finite")]
    NonFinite,
    #[error("value overflows f64 (ln|value| = {0:.3}); use the scaled variant")]
    Overflow(f64),
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// A function value with its derivative with respect to the full argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselPair {
    pub value: Complex64,
    pub derivative: Complex64,
}

/// `value · 2^exponent` and `derivative · 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledPair {
    pub value: Complex64,
    pub derivative: Complex64,
    pub exponent: i64,
}

impl ScaledPair {
    pub fn from_parts(v: Scaled, d: Scaled) -> ScaledPair {
        let e = if v.is_zero() {
            d.exp
        } else if d.is_zero() {
            v.exp
        } else {
            v.exp.max(d.exp)
        };
        ScaledPair {
            value: v.mant_at(e),
            derivative: d.mant_at(e),
            exponent: e,
        }
    }

    /// Natural logarithm of the common scale factor.
    pub fn ln_scale(&self) -> f64 {
        self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn value_scaled(&self) -> Scaled {
        Scaled::new(self.value, self.exponent)
    }

    pub fn derivative_scaled(&self) -> Scaled {
        Scaled::new(self.derivative, self.exponent)
    }

    /// Unscaled pair, or an overflow error.
    pub fn unscale(&self) -> Result<BesselPair> {
        let p = BesselPair {
            value: self.value_scaled().value(),
            derivative: self.derivative_scaled().value(),
        };
        if p.value.is_finite() && p.derivative.is_finite() {
            Ok(p)
        } else {
            let mag = self.value.norm().max(self.derivative.norm());
            Err(SpecFunError::Overflow(self.ln_scale() + mag.ln()))
        }
    }

    fn times(self, k: f64) -> ScaledPair {
        ScaledPair {
            value: self.value * k,
            derivative: self.derivative * k,
            exponent: self.exponent,
        }
    }
}

fn check(order: i32, z: Complex64) -> Result<usize> {
    if order.abs() > MAX_ORDER {
        return Err(SpecFunError::OrderOutOfRange(order));
    }
    if !z.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    Ok(order.unsigned_abs() as usize)
}

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn i_pow(p: i64) -> Complex64 {
    match p.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn j_pair_nonneg(n: usize, z: Complex64) -> ScaledPair {
    let [jm1, j0, jp1] = jfun::j_triple(n, z);
    let d = if n == 0 {
        -jp1
    } else {
        jm1.sub(jp1).scale(Complex64::new(0.5, 0.0))
    };
    ScaledPair::from_parts(j0, d)
}

/// Scaled J_m(z) and J_m'(z).
pub fn bessel_j_scaled(order: i32, z: Complex64) -> Result<ScaledPair> {
    let n = check(order, z)?;
    let p = j_pair_nonneg(n, z);
    Ok(if order < 0 { p.times(parity(n)) } else { p })
}

/// J_m(z) and J_m'(z).
pub fn bessel_j(order: i32, z: Complex64) -> Result<BesselPair> {
    bessel_j_scaled(order, z)?.unscale()
}

/// Scaled I_m(z) and I_m'(z).
pub fn bessel_i_scaled(order: i32, z: Complex64) -> Result<ScaledPair> {
    let n = check(order, z)?;
    let iz = Complex64::new(-z.im, z.re);
    let p = j_pair_nonneg(n, iz);
    let rot = i_pow(-(n as i64));
    Ok(ScaledPair {
        value: p.value * rot,
        derivative: p.derivative * rot * Complex64::new(0.0, 1.0),
        exponent: p.exponent,
    })
}

/// I_m(z) and I_m'(z).
pub fn bessel_i(order: i32, z: Complex64) -> Result<BesselPair> {
    bessel_i_scaled(order, z)?.unscale()
}

fn hankel_domain(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(SpecFunError::Singular);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(SpecFunError::BranchCut(z));
    }
    Ok(())
}

/// Scaled H⁽¹⁾_m(z) and its derivative.
pub fn hankel1_scaled(order: i32, z: Complex64) -> Result<ScaledPair> {
    let n = check(order, z)?;
    hankel_domain(z)?;
    let (v, d) = kfun::hankel_pair(n, z);
    let p = ScaledPair::from_parts(v, d);
    Ok(if order < 0 { p.times(parity(n)) } else { p })
}

/// H⁽¹⁾_m(z) and its derivative.
pub fn hankel1(order: i32, z: Complex64) -> Result<BesselPair> {
    hankel1_scaled(order, z)?.unscale()
}

/// Scaled K_m(z) and K_m'(z) for Re z ≥ 0, z ≠ 0. Used for validation and
/// as the backbone of [`hankel1`]; K is not continued into Re z < 0.
pub fn bessel_k_scaled(order: i32, z: Complex64) -> Result<ScaledPair> {
    let n = check(order, z)?;
    if z.re == 0.0 && z.im == 0.0 {
        return Err(SpecFunError::Singular);
    }
    if z.re < 0.0 {
        return Err(SpecFunError::BranchCut(z));
    }
    let [km1, k0, kp1] = kfun::k_triple(n, z);
    let d = km1.add(kp1).scale(Complex64::new(-0.5, 0.0));
    Ok(ScaledPair::from_parts(k0, d))
}

/// K_m(z) and K_m'(z) for Re z ≥ 0.
pub fn bessel_k(order: i32, z: Complex64) -> Result<BesselPair> {
    bessel_k_scaled(order, z)?.unscale()
}

/// Y_m(z) = −i(H⁽¹⁾_m − J_m), scaled. Near the real axis the imaginary part
/// of the Hankel value already carries Y to full accuracy; this combination
/// loses relative accuracy only where |Y| ≪ |J|.
pub fn bessel_y_scaled(order: i32, z: Complex64) -> Result<ScaledPair> {
    let h = hankel1_scaled(order, z)?;
    let j = bessel_j_scaled(order, z)?;
    let v = h.value_scaled().sub(j.value_scaled());
    let d = h.derivative_scaled().sub(j.derivative_scaled());
    let mi = Complex64::new(0.0, -1.0);
    Ok(ScaledPair::from_parts(v.scale(mi), d.scale(mi)))
}

/// Y_m(z) and Y_m'(z).
pub fn bessel_y(order: i32, z: Complex64) -> Result<BesselPair> {
    bessel_y_scaled(order, z)?.unscale()
}

fn seq_check(max_order: usize, z: Complex64) -> Result<()> {
    if max_order > MAX_ORDER as usize {
        return Err(SpecFunError::OrderOutOfRange(max_order as i32));
    }
    if !z.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    Ok(())
}

fn unscale_all(v: Vec<Scaled>) -> Result<Vec<Complex64>> {
    v.into_iter()
        .map(|s| {
            let x = s.value();
            if x.is_finite() {
                Ok(x)
            } else {
                Err(SpecFunError::Overflow(s.ln_abs()))
            }
        })
        .collect()
}

/// J_0(z), …, J_max(z) from a single backward recurrence. Values that
/// underflow are returned as zero.
pub fn bessel_j_seq(max_order: usize, z: Complex64) -> Result<Vec<Complex64>> {
    unscale_all(bessel_j_seq_scaled(max_order, z)?)
}

/// I_0(z), …, I_max(z).
pub fn bessel_i_seq(max_order: usize, z: Complex64) -> Result<Vec<Complex64>> {
    unscale_all(bessel_i_seq_scaled(max_order, z)?)
}

/// H⁽¹⁾_0(z), …, H⁽¹⁾_max(z).
pub fn hankel1_seq(max_order: usize, z: Complex64) -> Result<Vec<Complex64>> {
    unscale_all(hankel1_seq_scaled(max_order, z)?)
}

/// Scaled J_0(z), …, J_max(z); never overflows.
pub fn bessel_j_seq_scaled(max_order: usize, z: Complex64) -> Result<Vec<Scaled>> {
    seq_check(max_order, z)?;
    Ok(jfun::j_values(max_order, z))
}

/// Scaled I_0(z), …, I_max(z).
pub fn bessel_i_seq_scaled(max_order: usize, z: Complex64) -> Result<Vec<Scaled>> {
    seq_check(max_order, z)?;
    let iz = Complex64::new(-z.im, z.re);
    Ok(jfun::j_values(max_order, iz)
        .into_iter()
        .enumerate()
        .map(|(k, s)| s.scale(i_pow(-(k as i64))))
        .collect())
}

/// Scaled H⁽¹⁾_0(z), …, H⁽¹⁾_max(z).
pub fn hankel1_seq_scaled(max_order: usize, z: Complex64) -> Result<Vec<Scaled>> {
    seq_check(max_order, z)?;
    hankel_domain(z)?;
    if z.im >= 0.0 {
        return Ok(kfun::hankel_values_upper(max_order, z));
    }
    let hb = kfun::hankel_values_upper(max_order, z.conj());
    let j = jfun::j_values(max_order, z);
    Ok(j.into_iter()
        .zip(hb)
        .map(|(jj, hh)| jj.scale(Complex64::new(2.0, 0.0)).sub(hh.conj()))
        .collect())
}
