//! Boundary-layer (WKB) expansion of surface plasmons along a smooth
//! interface: quasi-resonances λ̲_m = (2πm/L)² Σ λ_n h^n with h = L/(2πm),
//! phases θ_n(s), profiles φ_n^±(s, σ) in the scaled normal variable
//! σ = ξ/h, and the plasmonic intervals derived from √λ̲_m.
//!
//! The operator 𝓛_h = h² e^{−iθ/h} P e^{iθ/h} is expanded in h as truncated
//! series whose coefficients are σ-polynomials; each order is then a pair
//! of constant-coefficient ODEs in σ coupled by the transmission
//! conditions, solved with amplitude α ≡ 1.

mod eval;
mod hierarchy;
mod poly;

pub use eval::{quasimode_eval, quasimode_on_grid, winding_number, wkb_residual, Residual};
pub use hierarchy::OperatorCoeffs;
pub use poly::{ode_particular, GridFn, SigmaPoly};

use crate::diskmodel::PlasmonPrediction;
use crate::geometry::{permittivity_trace, spectral, BoundaryCurve, BoundaryTrace, GeometryError, PermittivityProfile};
use hierarchy::SideSeries;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WkbError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("1 − η₀⁻² changes sign along the interface")]
    MixedSign,
    #[error("η₀ = {eta0} is too close to 1 at node {node}")]
    CriticalCoefficient { node: usize, eta0: f64 },
    #[error("order {requested} requested, expansion available through order {available}")]
    OrderUnavailable { requested: usize, available: usize },
    #[error("hierarchy failed at order {order}: {reason}")]
    Hierarchy { order: usize, reason: String },
    #[error("plasmonic intervals need 1 − η₀⁻² > 0 (ε_c < −1 on the interface)")]
    WrongRegime,
    #[error("point ξ = {xi} lies outside the collar |ξ| < {delta}")]
    OutOfCollar { xi: f64, delta: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, WkbError>;

/// Cavity side (σ < 0) or exterior side (σ > 0) of the interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Minus => 0,
            Side::Plus => 1,
        }
    }
}

/// q(s, σ) e^{−c(s)|σ|} on one side.
#[derive(Clone, Debug)]
pub struct SigmaPolyExp {
    pub side: Side,
    pub rate: Vec<f64>,
    pub poly: SigmaPoly,
}

impl SigmaPolyExp {
    /// Exponent coefficient d with e^{−c|σ|} = e^{dσ} on this side.
    pub fn exponent(&self) -> Vec<f64> {
        match self.side {
            Side::Minus => self.rate.clone(),
            Side::Plus => self.rate.iter().map(|c| -c).collect(),
        }
    }

    pub fn eval(&self, j: usize, sigma: f64) -> Complex64 {
        self.poly.eval(j, sigma) * (-self.rate[j] * sigma.abs()).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WkbOptions {
    /// Highest order N of the hierarchy.
    pub order: usize,
    /// Use the branch θ₀′ = −ĥ (the complex-conjugate quasi-mode).
    pub conjugate: bool,
}

impl Default for WkbOptions {
    fn default() -> Self {
        WkbOptions { order: 2, conjugate: false }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SideData {
    pub d: Vec<f64>,
    pub d_prime: GridFn,
}

/// Order-0 data of the hierarchy.
#[derive(Clone, Debug)]
pub struct Order0 {
    /// ς, the sign of 1 − η₀⁻².
    pub sign: f64,
    pub fhat: Vec<f64>,
    pub hhat: Vec<f64>,
    pub lambda0: f64,
    pub theta0: Vec<f64>,
    pub phi0: [SigmaPolyExp; 2],
}

/// f̂ = |1 − η₀⁻²|^{−1/2}, ĥ = f̂/⟨f̂⟩, λ₀ = ς/⟨f̂⟩², θ₀ = ∫ĥ and
/// φ₀^± = exp(−|σ| ĥ η₀^{∓1}).
pub fn solve_order0(curve: &BoundaryCurve, trace: &BoundaryTrace) -> Result<Order0> {
    let eta0 = trace.eta0();
    if eta0.len() != curve.len() {
        return Err(GeometryError::GridMismatch { expected: curve.len(), got: eta0.len() }.into());
    }
    let mut sign = 0.0;
    for (j, &e) in eta0.iter().enumerate() {
        if (e - 1.0).abs() < 1e-8 {
            return Err(WkbError::CriticalCoefficient { node: j, eta0: e });
        }
        let sj = (1.0 - 1.0 / (e * e)).signum();
        if sign == 0.0 {
            sign = sj;
        } else if sj != sign {
            return Err(WkbError::MixedSign);
        }
    }
    let fhat: Vec<f64> = eta0.iter().map(|e| (1.0 - 1.0 / (e * e)).abs().powf(-0.5)).collect();
    let mean = spectral::mean(&fhat);
    let hhat: Vec<f64> = fhat.iter().map(|f| f / mean).collect();
    let theta0 = spectral::antiderivative(&hhat, curve.length);
    let n = curve.len();
    let one = SigmaPoly::constant(poly::real_grid(&vec![1.0; n]));
    let phi0 = [
        SigmaPolyExp {
            side: Side::Minus,
            rate: hhat.iter().zip(eta0).map(|(h, e)| h * e).collect(),
            poly: one.clone(),
        },
        SigmaPolyExp {
            side: Side::Plus,
            rate: hhat.iter().zip(eta0).map(|(h, e)| h / e).collect(),
            poly: one,
        },
    ];
    Ok(Order0 { sign, lambda0: sign / (mean * mean), fhat, hhat, theta0, phi0 })
}

/// The expansion through some order N.
#[derive(Clone, Debug)]
pub struct WkbExpansion {
    pub curve: BoundaryCurve,
    pub trace: BoundaryTrace,
    pub profile: PermittivityProfile,
    pub sign: f64,
    pub conjugate: bool,
    pub fhat: Vec<f64>,
    pub hhat: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Imaginary parts of the computed λ_n, zero up to rounding.
    pub lambda_imag: Vec<f64>,
    pub theta: Vec<GridFn>,
    /// θ_n′ on the grid.
    pub dtheta: Vec<GridFn>,
    /// `phi[n] = [φ_n⁻, φ_n⁺]`.
    pub phi: Vec<[SigmaPolyExp; 2]>,
    pub(crate) sides: [SideData; 2],
    pub(crate) ops: Vec<[OperatorCoeffs; 2]>,
}

impl WkbExpansion {
    /// Traces are computed to the order the hierarchy needs, then orders
    /// 0..=N are solved.
    pub fn build(curve: &BoundaryCurve, profile: &PermittivityProfile, opts: &WkbOptions) -> Result<Self> {
        let trace = permittivity_trace(profile, curve, opts.order)?;
        let mut e = Self::order0(curve, trace, profile, opts.conjugate)?;
        for _ in 1..=opts.order {
            solve_ordern(&mut e)?;
        }
        Ok(e)
    }

    /// Orders above 0 are added with [`solve_ordern`]; operator tables
    /// are prepared up to the trace order.
    pub fn order0(curve: &BoundaryCurve, trace: BoundaryTrace, profile: &PermittivityProfile, conjugate: bool) -> Result<Self> {
        let o = solve_order0(curve, &trace)?;
        let tp: GridFn = o.hhat.iter().map(|h| Complex64::new(if conjugate { -h } else { *h }, 0.0)).collect();
        let theta0: GridFn = o.theta0.iter().map(|t| Complex64::new(if conjugate { -t } else { *t }, 0.0)).collect();
        let max_order = trace.order();
        let mut sides = Vec::new();
        let mut series = Vec::new();
        for (si, side) in [Side::Minus, Side::Plus].into_iter().enumerate() {
            let d = o.phi0[si].exponent();
            let d_prime = spectral::to_complex(&spectral::derivative(&d, curve.length));
            sides.push(SideData { d, d_prime });
            series.push(SideSeries::new(side, &curve.curvature, &trace.eta, max_order));
        }
        let ops = (0..=max_order)
            .map(|k| {
                [
                    OperatorCoeffs::new(Side::Minus, &series[0], k),
                    OperatorCoeffs::new(Side::Plus, &series[1], k),
                ]
            })
            .collect();
        Ok(WkbExpansion {
            curve: curve.clone(),
            trace,
            profile: profile.clone(),
            sign: o.sign,
            conjugate,
            fhat: o.fhat,
            hhat: o.hhat,
            lambda: vec![o.lambda0],
            lambda_imag: vec![0.0],
            theta: vec![theta0],
            dtheta: vec![tp],
            phi: vec![o.phi0],
            sides: [sides[0].clone(), sides[1].clone()],
            ops,
        })
    }

    /// Highest solved order.
    pub fn order(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn operator_coeffs(&self, side: Side, n: usize) -> Result<&OperatorCoeffs> {
        self.ops
            .get(n)
            .map(|o| &o[side.index()])
            .ok_or(WkbError::OrderUnavailable { requested: n, available: self.ops.len() - 1 })
    }

    /// h = L/(2πm).
    pub fn h(&self, m: i32) -> f64 {
        self.curve.length / (2.0 * PI * m as f64)
    }

    /// Λ(h) = Σ_{n ≤ order} λ_n hⁿ.
    pub fn big_lambda(&self, h: f64, order: usize) -> f64 {
        self.lambda.iter().take(order + 1).rev().fold(0.0, |acc, l| acc * h + l)
    }

    /// λ̲_m = (2πm/L)² Λ(L/2πm).
    pub fn quasi_resonance(&self, m: i32, order: usize) -> f64 {
        let h = self.h(m);
        self.big_lambda(h, order) / (h * h)
    }
}

/// Appends the next order of the hierarchy.
pub fn solve_ordern(exp: &mut WkbExpansion) -> Result<()> {
    hierarchy::solve_next(exp)
}

/// √λ̲_m = (2πm/L)(ℓ̆₀ + ℓ̆₁h + ℓ̆₂h² + …). For λ₀ < 0 the coefficients are
/// those of √(−λ̲_m) and `imaginary` is set (ℓ̆ on the positive imaginary
/// axis). Orders not computed are taken as zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiResonance {
    pub ell: [f64; 3],
    pub imaginary: bool,
    pub length: f64,
}

impl QuasiResonance {
    /// ℓ̆(m) = Σ_{n < terms} ℓ̆_n (L/2πm)^{n−1}.
    pub fn center(&self, m: i32, terms: usize) -> f64 {
        let h = self.length / (2.0 * PI * m as f64);
        self.ell.iter().take(terms).enumerate().map(|(n, l)| l * h.powi(n as i32 - 1)).sum()
    }

    pub fn prediction(&self) -> PlasmonPrediction {
        PlasmonPrediction { coeffs: self.ell, length: self.length, imaginary: self.imaginary }
    }
}

pub fn sqrt_coeffs(l0: f64, l1: f64, l2: f64) -> [f64; 3] {
    let e0 = l0.sqrt();
    [e0, l1 / (2.0 * e0), l2 / (2.0 * e0) - l1 * l1 / (8.0 * l0.powf(1.5))]
}

pub fn quasi_resonance_coeffs(exp: &WkbExpansion) -> QuasiResonance {
    let l = |n: usize| exp.lambda.get(n).copied().unwrap_or(0.0);
    let s = exp.sign;
    QuasiResonance {
        ell: sqrt_coeffs(s * l(0), s * l(1), s * l(2)),
        imaginary: s < 0.0,
        length: exp.curve.length,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlasmonInterval {
    pub m: i32,
    pub a: f64,
    pub center: f64,
    pub b: f64,
}

/// I_m = [a_m, b_m] with a_m, b_m = (2πm/L)ℓ̆₀ + ℓ̆₁ + {min, max}(0, 2ℓ̆₂) L/(2πm).
pub fn plasmon_intervals(exp: &WkbExpansion, ms: &[i32]) -> Result<Vec<PlasmonInterval>> {
    if exp.sign < 0.0 {
        return Err(WkbError::WrongRegime);
    }
    let q = quasi_resonance_coeffs(exp);
    ms.iter()
        .map(|&m| {
            if m < 1 {
                return Err(WkbError::InvalidInput(format!("interval index m = {m} must be ≥ 1")));
            }
            let h = exp.h(m);
            let base = q.ell[0] / h + q.ell[1];
            Ok(PlasmonInterval {
                m,
                a: base + (2.0 * q.ell[2]).min(0.0) * h,
                center: base + q.ell[2] * h,
                b: base + (2.0 * q.ell[2]).max(0.0) * h,
            })
        })
        .collect()
}
