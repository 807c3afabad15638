//! Exact Fourier–Bessel solution for a disk of radius R with constant
//! permittivity ε_c = −η² in vacuum.
//!
//! Mode m of the field is w_m(r) e^{imθ}, with interior α_m I_m(ηkr) and
//! exterior J_m(kr) + β_m H⁽¹⁾_m(kr). Continuity of u and of ε⁻¹∂_r u at
//! r = R gives the 2×2 transmission system solved here.

mod profile;
mod resonance;
mod sweep;

pub use profile::{leading_order_disk, mode_profile, LeadingOrder, ModeProfile};
pub use resonance::{
    classify, default_region_ell_squared, eigenvalue_function, eigenvalue_scan, refine_near_real,
    resonances_disk, resonances_ell_squared, PlasmonPrediction, ResonanceClass, ResonanceRecord,
    ResonanceSet,
};
pub use sweep::{dy_zeros, geometric_refinement, sweep, SweepOptions, SweepSample};

use crate::quadrature::GaussLegendre;
use crate::rootfind::RootFindError;
use crate::specfun::{self, Scaled, ScaledPair, SpecFunError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("invalid disk configuration: {0}")]
    InvalidConfig(String),
    #[error("transmission system for m = {m} is numerically singular at k = {k}")]
    Singular { m: i32, k: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    RootFind(#[from] RootFindError),
}

pub type Result<T> = std::result::Result<T, DiskError>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Disk radius, contrast η = √(−ε_c), observation radius ρ and Fourier
/// cutoff M (modes −M..=M).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskConfig {
    pub radius: f64,
    pub eta: f64,
    pub rho: f64,
    pub truncation: usize,
}

impl DiskConfig {
    pub fn new(radius: f64, eta: f64, rho: f64, truncation: usize) -> Result<Self> {
        let cfg = DiskConfig {
            radius,
            eta,
            rho,
            truncation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build from the cavity permittivity ε_c < 0.
    pub fn from_permittivity(radius: f64, eps: f64, rho: f64, truncation: usize) -> Result<Self> {
        if !(eps < 0.0) {
            return Err(DiskError::InvalidConfig(format!(
                "cavity permittivity must be negative, got {eps}"
            )));
        }
        Self::new(radius, (-eps).sqrt(), rho, truncation)
    }

    pub fn permittivity(&self) -> f64 {
        -self.eta * self.eta
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DiskError::InvalidConfig(m));
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.rho > self.radius && self.rho.is_finite()) {
            return bad(format!(
                "observation radius {} must exceed the disk radius {}",
                self.rho, self.radius
            ));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if (self.eta - 1.0).abs() < 1e-12 {
            return bad("eta = 1 (permittivity -1) is the critical contrast".into());
        }
        if self.truncation > specfun::MAX_ORDER as usize {
            return bad(format!(
                "truncation {} exceeds the supported order {}",
                self.truncation,
                specfun::MAX_ORDER
            ));
        }
        Ok(())
    }
}

fn check_z(z: Complex64) -> Result<()> {
    if z == c(0.0, 0.0) {
        return Err(SpecFunError::Singular.into());
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(SpecFunError::BranchCut(z).into());
    }
    Ok(())
}

fn unscale(s: Scaled) -> Result<Complex64> {
    let v = s.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecFunError::Overflow(s.ln_abs()).into())
    }
}

/// M_m(η, z) = [[I_m(ηz), −H_m(z)], [−η⁻¹ I_m'(ηz), −H_m'(z)]].
pub fn transmission_matrix(m: i32, eta: f64, z: Complex64) -> Result<[[Complex64; 2]; 2]> {
    check_z(z)?;
    let i = specfun::bessel_i(m, eta * z)?;
    let h = specfun::hankel1(m, z)?;
    Ok([
        [i.value, -h.value],
        [-i.derivative / eta, -h.derivative],
    ])
}

/// det M_m(η, z) = −η⁻¹ I_m'(ηz) H_m(z) − I_m(ηz) H_m'(z).
pub fn det_m(m: i32, eta: f64, z: Complex64) -> Result<Complex64> {
    unscale(det_m_scaled(m, eta, z)?.value_scaled())
}

/// Scaled determinant and its z-derivative, sharing one binary exponent.
pub fn det_m_scaled(m: i32, eta: f64, z: Complex64) -> Result<ScaledPair> {
    check_z(z)?;
    let x = eta * z;
    let ip = specfun::bessel_i_scaled(m, x)?;
    let hp = specfun::hankel1_scaled(m, z)?;
    let (i, di) = (ip.value, ip.derivative);
    let (h, dh) = (hp.value, hp.derivative);
    let mf = m as f64;
    let d = -di * h / eta - i * dh;
    let ddi = -di / x + (1.0 + mf * mf / (x * x)) * i;
    let ddh = -dh / z - (1.0 - mf * mf / (z * z)) * h;
    let dd = -ddi * h - (eta + 1.0 / eta) * di * dh - i * ddh;
    Ok(ScaledPair {
        value: d,
        derivative: dd,
        exponent: ip.exponent + hp.exponent,
    })
}

/// |det| relative to the size of its two terms.
pub fn det_relative(m: i32, eta: f64, z: Complex64) -> Result<f64> {
    let ip = specfun::bessel_i_scaled(m, eta * z)?;
    let hp = specfun::hankel1_scaled(m, z)?;
    let a = ip.derivative * hp.value / eta;
    let b = ip.value * hp.derivative;
    Ok((a + b).norm() / (a.norm() + b.norm()))
}

/// On the real axis H = J + iY and the determinant splits as
/// D_J + i D_Y with both parts real. The two parts carry separate scales
/// because |Y| ≫ |J| at high order.
#[derive(Clone, Copy, Debug)]
pub struct RealAxisParts {
    pub dj: Scaled,
    pub dy: Scaled,
    pub dj_prime: Scaled,
    pub dy_prime: Scaled,
}

/// D_J, D_Y and their z-derivatives at real z > 0.
pub fn det_real_parts(m: i32, eta: f64, z: f64) -> Result<RealAxisParts> {
    if !(z > 0.0) {
        return Err(DiskError::InvalidConfig(format!("real-axis split needs z > 0, got {z}")));
    }
    let zc = c(z, 0.0);
    let x = eta * z;
    let ip = specfun::bessel_i_scaled(m, zc * eta)?;
    let jp = specfun::bessel_j_scaled(m, zc)?;
    let hp = specfun::hankel1_scaled(m, zc)?;
    let mf = m as f64;
    let (i, di) = (ip.value.re, ip.derivative.re);
    let ddi = -di / x + (1.0 + mf * mf / (x * x)) * i;
    let part = |f: f64, df: f64, e: i64| {
        let ddf = -df / z - (1.0 - mf * mf / (z * z)) * f;
        let v = -di * f / eta - i * df;
        let dv = -ddi * f - (eta + 1.0 / eta) * di * df - i * ddf;
        (
            Scaled::new(c(v, 0.0), ip.exponent + e),
            Scaled::new(c(dv, 0.0), ip.exponent + e),
        )
    };
    let (dj, dj_prime) = part(jp.value.re, jp.derivative.re, jp.exponent);
    let (dy, dy_prime) = part(hp.value.im, hp.derivative.im, hp.exponent);
    Ok(RealAxisParts {
        dj,
        dy,
        dj_prime,
        dy_prime,
    })
}

/// Solve the 2×2 system by elimination with partial pivoting. Only an exact
/// zero pivot is rejected: for real z the first column (the I_m terms) is
/// real, so the real and imaginary parts of the Schur pivot carry the J and
/// Y contributions separately and the J part keeps full relative accuracy
/// even when it is far below the Y part.
fn solve2(a: [[Complex64; 2]; 2], b: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let (p, q) = if a[0][0].norm() >= a[1][0].norm() {
        (0, 1)
    } else {
        (1, 0)
    };
    let piv = a[p][0];
    if piv.norm() == 0.0 {
        return None;
    }
    let l = a[q][0] / piv;
    let u11 = a[q][1] - l * a[p][1];
    if u11.norm() == 0.0 || !u11.is_finite() {
        return None;
    }
    let y1 = b[q] - l * b[p];
    let x1 = y1 / u11;
    let x0 = (b[p] - a[p][1] * x1) / piv;
    Some([x0, x1])
}

/// Phase-free (α̂, β̂) for m ≥ 0 in scaled form: the solution of
/// M_m(η, z)(α, β)ᵀ = (J_m(z), J_m'(z))ᵀ.
fn solve_mode_scaled(m: usize, eta: f64, z: f64) -> Result<(Scaled, Scaled)> {
    let zc = c(z, 0.0);
    let mi = m as i32;
    let ip = specfun::bessel_i_scaled(mi, zc * eta)?;
    let hp = specfun::hankel1_scaled(mi, zc)?;
    let jp = specfun::bessel_j_scaled(mi, zc)?;
    // columns carry the I and H exponents, the right-hand side the J one
    let a = [
        [ip.value, -hp.value],
        [-ip.derivative / eta, -hp.derivative],
    ];
    let [x0, x1] = solve2(a, [jp.value, jp.derivative]).ok_or(DiskError::Singular { m: mi, k: z })?;
    Ok((
        Scaled::new(x0, jp.exponent - ip.exponent),
        Scaled::new(x1, jp.exponent - hp.exponent),
    ))
}

/// (α_m, β_m) for the incident mode J_m(kr) (no plane-wave phase).
pub fn solve_scatter_mode(m: i32, config: &DiskConfig, k: f64) -> Result<(Complex64, Complex64)> {
    config.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(DiskError::InvalidConfig(format!("wavenumber must be positive, got {k}")));
    }
    if m.unsigned_abs() as i32 > specfun::MAX_ORDER {
        return Err(SpecFunError::OrderOutOfRange(m).into());
    }
    let (a, b) = solve_mode_scaled(m.unsigned_abs() as usize, config.eta, k * config.radius)?;
    let sign = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
    Ok((a.value() * sign, b.value()))
}

/// Radial factor of one term of the Jacobi–Anger expansion of e^{ik d·x},
/// d = (cos φ, sin φ): r ↦ phase · J_m(kr) with phase e^{im(π/2−φ)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneWaveMode {
    pub order: i32,
    pub k: f64,
    pub phase: Complex64,
}

impl PlaneWaveMode {
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        Ok(self.phase * specfun::bessel_j(self.order, c(self.k * r, 0.0))?.value)
    }
}

fn incident_phase(m: i32, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, m as f64 * (FRAC_PI_2 - phi))
}

/// Modes −M..=M of the incident plane wave.
pub fn plane_wave_coeffs(k: f64, phi: f64, truncation: usize) -> Vec<PlaneWaveMode> {
    let mm = truncation as i32;
    (-mm..=mm)
        .map(|m| PlaneWaveMode {
            order: m,
            k,
            phase: incident_phase(m, phi),
        })
        .collect()
}

/// e^{ik(x cos φ + y sin φ)}.
pub fn plane_wave(k: f64, phi: f64, x: f64, y: f64) -> Complex64 {
    Complex64::from_polar(1.0, k * (x * phi.cos() + y * phi.sin()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldPart {
    Total,
    Scattered,
    Incident,
}

/// Scattering solution for one plane wave. Immutable once built.
#[derive(Clone, Debug)]
pub struct ScatterSolution {
    pub config: DiskConfig,
    pub k: f64,
    pub direction: f64,
    // phase-free coefficients for m = 0..=M
    alpha_hat: Vec<Scaled>,
    beta_hat: Vec<Scaled>,
}

impl ScatterSolution {
    /// Solve every mode |m| ≤ M for the plane wave of direction angle φ.
    pub fn new(config: &DiskConfig, k: f64, direction: f64) -> Result<Self> {
        config.validate()?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(DiskError::InvalidConfig(format!("wavenumber must be positive, got {k}")));
        }
        let z = k * config.radius;
        let (alpha_hat, beta_hat) = (0..=config.truncation)
            .map(|m| solve_mode_scaled(m, config.eta, z))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(ScatterSolution {
            config: *config,
            k,
            direction,
            alpha_hat,
            beta_hat,
        })
    }

    fn neg_factor(&self, m: i32) -> Complex64 {
        let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
        incident_phase(m, self.direction) * s
    }

    /// α_m including the incident phase; zero beyond the truncation.
    pub fn alpha(&self, m: i32) -> Complex64 {
        match self.alpha_hat.get(m.unsigned_abs() as usize) {
            Some(a) => a.value() * self.neg_factor(m),
            None => c(0.0, 0.0),
        }
    }

    /// β_m including the incident phase.
    pub fn beta(&self, m: i32) -> Complex64 {
        match self.beta_hat.get(m.unsigned_abs() as usize) {
            Some(b) => b.value() * incident_phase(m, self.direction),
            None => c(0.0, 0.0),
        }
    }

    /// α_{−M}, …, α_M.
    pub fn alphas(&self) -> Vec<Complex64> {
        let mm = self.config.truncation as i32;
        (-mm..=mm).map(|m| self.alpha(m)).collect()
    }

    pub fn betas(&self) -> Vec<Complex64> {
        let mm = self.config.truncation as i32;
        (-mm..=mm).map(|m| self.beta(m)).collect()
    }

    /// Phase-free incident and scattered radial factors for m = 0..=M.
    pub fn radial_modes(&self, r: f64) -> Result<Vec<(Complex64, Complex64)>> {
        let mm = self.config.truncation;
        let kr = c(self.k * r, 0.0);
        let j = specfun::bessel_j_seq_scaled(mm, kr)?;
        let sc: Vec<Complex64> = if r < self.config.radius {
            let i = specfun::bessel_i_seq_scaled(mm, kr * self.config.eta)?;
            (0..=mm)
                .map(|m| (self.alpha_hat[m] * i[m]).sub(j[m]).value())
                .collect()
        } else {
            let h = specfun::hankel1_seq_scaled(mm, kr)?;
            (0..=mm).map(|m| (self.beta_hat[m] * h[m]).value()).collect()
        };
        Ok(j.iter().map(|v| v.value()).zip(sc).collect())
    }

    fn eval_point(&self, x: f64, y: f64, part: FieldPart) -> Result<Complex64> {
        let r = x.hypot(y);
        let psi = y.atan2(x) + FRAC_PI_2 - self.direction;
        let modes = self.radial_modes(r)?;
        let mut sum = c(0.0, 0.0);
        for (m, (inc, sc)) in modes.into_iter().enumerate() {
            let w = match part {
                FieldPart::Total => inc + sc,
                FieldPart::Scattered => sc,
                FieldPart::Incident => inc,
            };
            // e^{imψ} + (−1)^m e^{−imψ} folds the ±m pair
            let ang = if m == 0 {
                c(1.0, 0.0)
            } else if m % 2 == 0 {
                c(2.0 * (m as f64 * psi).cos(), 0.0)
            } else {
                c(0.0, 2.0 * (m as f64 * psi).sin())
            };
            sum += w * ang;
        }
        Ok(sum)
    }
}

/// Truncated Fourier–Bessel series at each point (x, y).
pub fn field_eval(
    solution: &ScatterSolution,
    points: &[(f64, f64)],
    part: FieldPart,
) -> Result<Vec<Complex64>> {
    points
        .par_iter()
        .map(|&(x, y)| solution.eval_point(x, y, part))
        .collect()
}

/// Σ_m |w_m^sc(r)|² r over all |m| ≤ M.
fn scattered_density(sol: &ScatterSolution, r: f64) -> Result<f64> {
    let modes = sol.radial_modes(r)?;
    let mut s = 0.0;
    for (m, (_, sc)) in modes.into_iter().enumerate() {
        let w = if m == 0 { 1.0 } else { 2.0 };
        s += w * sc.norm_sqr();
    }
    Ok(s * r)
}

/// N_{ε,ρ}(k) = ‖u^sc‖ / ‖u^in‖ over the disk of radius ρ.
///
/// The scattered norm is 2π Σ_m ∫₀^ρ |w_m|² r dr by adaptive Gauss–Legendre
/// split at r = R; the incident norm is the exact πρ² (the Jacobi–Anger sum
/// of ∫|J_m|² r dr over all m).
pub fn stability_ratio(config: &DiskConfig, k: f64) -> Result<f64> {
    let sol = ScatterSolution::new(config, k, FRAC_PI_2)?;
    stability_ratio_of(&sol)
}

pub(crate) fn stability_ratio_of(sol: &ScatterSolution) -> Result<f64> {
    let gl = GaussLegendre::new(16);
    let cfg = &sol.config;
    let mut f = |r: f64| scattered_density(sol, r);
    let inner = gl.try_adaptive(&mut f, 0.0, cfg.radius, 1e-12, 1e-13, 30)?;
    let outer = gl.try_adaptive(&mut f, cfg.radius, cfg.rho, 1e-12, 1e-13, 30)?;
    let sc = 2.0 * PI * (inner + outer);
    let inc = PI * cfg.rho * cfg.rho;
    Ok((sc / inc).sqrt())
}
