use super::{BoundaryCurve, GeometryError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Serializable permittivity descriptions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PermittivityDescriptor {
    Constant { value: f64 },
    /// ε(x, y) = (ε_m + ε_M)/2 + (ε_M − ε_m)/2 · x.
    LinearX {
        eps_m: f64,
        #[serde(alias = "eps_M")]
        eps_max: f64,
    },
}

pub type FieldFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

/// Cavity permittivity ε_c.
#[derive(Clone)]
pub enum PermittivityProfile {
    Constant(f64),
    /// ε = c + a x.
    Linear { c: f64, a: f64 },
    /// Arbitrary smooth field; derivatives by central differences.
    User(FieldFn),
}

impl fmt::Debug for PermittivityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermittivityProfile::Constant(v) => write!(f, "Constant({v})"),
            PermittivityProfile::Linear { c, a } => write!(f, "Linear {{ c: {c}, a: {a} }}"),
            PermittivityProfile::User(_) => write!(f, "User(..)"),
        }
    }
}

impl From<PermittivityDescriptor> for PermittivityProfile {
    fn from(d: PermittivityDescriptor) -> Self {
        match d {
            PermittivityDescriptor::Constant { value } => PermittivityProfile::Constant(value),
            PermittivityDescriptor::LinearX { eps_m, eps_max } => PermittivityProfile::Linear {
                c: 0.5 * (eps_m + eps_max),
                a: 0.5 * (eps_max - eps_m),
            },
        }
    }
}

impl PermittivityProfile {
    pub fn user<F: Fn([f64; 2]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        PermittivityProfile::User(Arc::new(f))
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match self {
            PermittivityProfile::Constant(v) => *v,
            PermittivityProfile::Linear { c, a } => c + a * x[0],
            PermittivityProfile::User(f) => f(x),
        }
    }

    /// d·∇ε at x.
    pub fn directional_derivative(&self, x: [f64; 2], d: [f64; 2], step: f64) -> f64 {
        match self {
            PermittivityProfile::Constant(_) => 0.0,
            PermittivityProfile::Linear { a, .. } => a * d[0],
            PermittivityProfile::User(f) => {
                let at = |t: f64| f([x[0] + t * d[0], x[1] + t * d[1]]);
                (at(step) - at(-step)) / (2.0 * step)
            }
        }
    }

    /// ∂ⁿ_ξ η(p + ξ d) at ξ = 0 for n = 0..=order, η = √(−ε). `step` is
    /// the finite-difference spacing for user fields.
    pub fn eta_ray(&self, p: [f64; 2], d: [f64; 2], order: usize, step: f64) -> Vec<f64> {
        match self {
            PermittivityProfile::Constant(v) => {
                let mut out = vec![0.0; order + 1];
                out[0] = (-v).sqrt();
                out
            }
            PermittivityProfile::Linear { c, a } => {
                // q(ξ) = q0 + q1 ξ, ∂ⁿ q^{1/2} = (1/2)(1/2 − 1)…(1/2 − n + 1) q1ⁿ q0^{1/2 − n}
                let q0 = -(c + a * p[0]);
                let q1 = -a * d[0];
                let mut out = Vec::with_capacity(order + 1);
                let mut falling = 1.0;
                for n in 0..=order {
                    out.push(falling * q1.powi(n as i32) * q0.powf(0.5 - n as f64));
                    falling *= 0.5 - n as f64;
                }
                out
            }
            PermittivityProfile::User(f) => {
                let eta = |xi: f64| (-f([p[0] + xi * d[0], p[1] + xi * d[1]])).sqrt();
                (0..=order).map(|n| central_difference(&eta, n, step)).collect()
            }
        }
    }
}

/// n-th derivative at 0 by the centred n-th difference with spacing h
/// (one extra node for odd n so the stencil stays symmetric).
fn central_difference<F: Fn(f64) -> f64>(f: &F, n: usize, h: f64) -> f64 {
    if n == 0 {
        return f(0.0);
    }
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=n {
        let x = (n as f64 / 2.0 - k as f64) * h;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * f(x);
        binom *= (n - k) as f64 / (k + 1) as f64;
    }
    sum / h.powi(n as i32)
}

/// η and its exterior-normal derivatives at every node of Γ.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryTrace {
    /// `eta[n][j]` = ∂ⁿ_ξ η(s_j, 0).
    pub eta: Vec<Vec<f64>>,
}

impl BoundaryTrace {
    pub fn order(&self) -> usize {
        self.eta.len() - 1
    }

    pub fn eta0(&self) -> &[f64] {
        &self.eta[0]
    }

    pub fn eta1(&self) -> &[f64] {
        &self.eta[1]
    }

    pub fn eta_n(&self, n: usize) -> Result<&[f64]> {
        self.eta.get(n).map(|v| v.as_slice()).ok_or(GeometryError::TraceOrder(n))
    }
}

/// Traces η₀..η_order on the curve's arclength grid.
pub fn permittivity_trace(profile: &PermittivityProfile, curve: &BoundaryCurve, order: usize) -> Result<BoundaryTrace> {
    let n = curve.len();
    let order = order.max(1);
    let step = 1e-5 * curve.length;
    let mut eta = vec![vec![0.0; n]; order + 1];
    for j in 0..n {
        let eps = profile.eval(curve.points[j]);
        if !(eps < 0.0) {
            return Err(GeometryError::NonNegativePermittivity { s: curve.s[j], eps });
        }
        let e = profile.eta_ray(curve.points[j], curve.normal[j], order, step);
        if (e[0] - 1.0).abs() < 1e-8 {
            return Err(GeometryError::CriticalCoefficient { s: curve.s[j], eta0: e[0] });
        }
        for (k, v) in e.into_iter().enumerate() {
            eta[k][j] = v;
        }
    }
    Ok(BoundaryTrace { eta })
}
