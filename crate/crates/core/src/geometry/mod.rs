//! Closed smooth interfaces sampled at equispaced arclength, boundary means
//! and permittivity traces.

mod permittivity;
pub mod spectral;

pub use permittivity::{permittivity_trace, BoundaryTrace, PermittivityDescriptor, PermittivityProfile};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("grid size {0} must be a power of two and at least 64")]
    InvalidGrid(usize),
    #[error("invalid curve descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("curve is not immersed: |γ'| = {speed:.3e} at t = {t:.6}")]
    NotImmersed { t: f64, speed: f64 },
    #[error("curve self-intersects between nodes {0} and {1}")]
    SelfIntersecting(usize, usize),
    #[error("arclength inversion did not converge at node {0}")]
    Reparameterization(usize),
    #[error("grid function has {got} samples, curve has {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("η₀ = {eta0} is within 1e-8 of 1 at s = {s}")]
    CriticalCoefficient { s: f64, eta0: f64 },
    #[error("permittivity {eps} is not negative at s = {s}")]
    NonNegativePermittivity { s: f64, eps: f64 },
    #[error("trace order {0} is not available")]
    TraceOrder(usize),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Interface shapes. Fourier coefficients are indexed from k = 0
/// (`sin[0]` is ignored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveDescriptor {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// r(θ) ∝ 1 − 0.3 cos 2θ, scaled to length 2π.
    Peanut {},
    /// r(θ) = Σ cos_k cos kθ + sin_k sin kθ.
    Polar {
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Parametric {
        x_cos: Vec<f64>,
        #[serde(default)]
        x_sin: Vec<f64>,
        #[serde(default)]
        y_cos: Vec<f64>,
        y_sin: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

fn trig_series(cos: &[f64], sin: &[f64], t: f64) -> Jet {
    let mut j = Jet::default();
    for (k, a) in cos.iter().enumerate() {
        let kf = k as f64;
        let (s, c) = (kf * t).sin_cos();
        j.v += a * c;
        j.d1 -= a * kf * s;
        j.d2 -= a * kf * kf * c;
    }
    for (k, b) in sin.iter().enumerate().skip(1) {
        let kf = k as f64;
        let (s, c) = (kf * t).sin_cos();
        j.v += b * s;
        j.d1 += b * kf * c;
        j.d2 -= b * kf * kf * s;
    }
    j
}

/// A 2π-periodic parameterisation with analytic derivatives.
#[derive(Clone, Debug)]
enum Param {
    Polar { cos: Vec<f64>, sin: Vec<f64>, scale: f64 },
    Fourier { x: (Vec<f64>, Vec<f64>), y: (Vec<f64>, Vec<f64>), scale: f64 },
}

impl Param {
    fn from_descriptor(d: &CurveDescriptor) -> Result<Self> {
        let bad = |m: &str| Err(GeometryError::InvalidDescriptor(m.to_string()));
        Ok(match d {
            CurveDescriptor::Circle { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad("circle radius must be positive");
                }
                Param::Polar { cos: vec![*radius], sin: vec![], scale: 1.0 }
            }
            CurveDescriptor::Ellipse { a, b } => {
                if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad("ellipse semi-axes must be positive");
                }
                Param::Fourier { x: (vec![0.0, *a], vec![]), y: (vec![], vec![0.0, *b]), scale: 1.0 }
            }
            CurveDescriptor::Peanut {} => {
                let p = Param::Polar { cos: vec![1.0, 0.0, -0.3], sin: vec![], scale: 1.0 };
                let l = p.length_estimate(4096);
                Param::Polar { cos: vec![1.0, 0.0, -0.3], sin: vec![], scale: 2.0 * PI / l }
            }
            CurveDescriptor::Polar { cos, sin } => {
                if cos.is_empty() || cos.iter().chain(sin).any(|v| !v.is_finite()) {
                    return bad("polar coefficients must be finite and include r₀");
                }
                Param::Polar { cos: cos.clone(), sin: sin.clone(), scale: 1.0 }
            }
            CurveDescriptor::Parametric { x_cos, x_sin, y_cos, y_sin } => {
                if x_cos.iter().chain(x_sin).chain(y_cos).chain(y_sin).any(|v| !v.is_finite()) {
                    return bad("parametric coefficients must be finite");
                }
                Param::Fourier {
                    x: (x_cos.clone(), x_sin.clone()),
                    y: (y_cos.clone(), y_sin.clone()),
                    scale: 1.0,
                }
            }
        })
    }

    fn eval(&self, t: f64) -> (Jet, Jet) {
        match self {
            Param::Polar { cos, sin, scale } => {
                let r = trig_series(cos, sin, t);
                let (s, c) = t.sin_cos();
                let x = Jet {
                    v: r.v * c,
                    d1: r.d1 * c - r.v * s,
                    d2: r.d2 * c - 2.0 * r.d1 * s - r.v * c,
                };
                let y = Jet {
                    v: r.v * s,
                    d1: r.d1 * s + r.v * c,
                    d2: r.d2 * s + 2.0 * r.d1 * c - r.v * s,
                };
                (x.scaled(*scale), y.scaled(*scale))
            }
            Param::Fourier { x, y, scale } => (
                trig_series(&x.0, &x.1, t).scaled(*scale),
                trig_series(&y.0, &y.1, t).scaled(*scale),
            ),
        }
    }

    fn speed(&self, t: f64) -> f64 {
        let (x, y) = self.eval(t);
        x.d1.hypot(y.d1)
    }

    fn length_estimate(&self, n: usize) -> f64 {
        (0..n).map(|i| self.speed(2.0 * PI * i as f64 / n as f64)).sum::<f64>() * 2.0 * PI / n as f64
    }
}

impl Jet {
    fn scaled(self, s: f64) -> Jet {
        Jet { v: self.v * s, d1: self.d1 * s, d2: self.d2 * s }
    }
}

/// Interface Γ sampled at s_j = jL/n, counterclockwise, with exterior
/// normal n = (γ₂′, −γ₁′) and signed curvature κ.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCurve {
    pub descriptor: CurveDescriptor,
    pub length: f64,
    pub s: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub tangent: Vec<[f64; 2]>,
    pub normal: Vec<[f64; 2]>,
    pub curvature: Vec<f64>,
    /// Tubular half-width, 0.5 / max|κ|.
    pub delta: f64,
    /// Descriptor orientation was clockwise and has been reversed.
    pub reversed: bool,
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.curvature.iter().fold(0.0, |a, k| a.max(k.abs()))
    }

    /// Point at offset ξ along the exterior normal of node j.
    pub fn tubular_point(&self, j: usize, xi: f64) -> [f64; 2] {
        let (p, n) = (self.points[j], self.normal[j]);
        [p[0] + xi * n[0], p[1] + xi * n[1]]
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        let h = self.length / n as f64;
        0.5 * (0..n)
            .map(|j| {
                let (p, t) = (self.points[j], self.tangent[j]);
                p[0] * t[1] - p[1] * t[0]
            })
            .sum::<f64>()
            * h
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < 64 || !n.is_power_of_two() {
        return Err(GeometryError::InvalidGrid(n));
    }
    Ok(())
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Samples the descriptor at n equispaced arclength nodes.
pub fn build_curve(descriptor: &CurveDescriptor, n: usize) -> Result<BoundaryCurve> {
    check_grid(n)?;
    let param = Param::from_descriptor(descriptor)?;

    // Speed on an oversampled parameter grid; its Fourier series gives s(t).
    let big = 4 * n.max(256);
    let tgrid: Vec<f64> = (0..big).map(|i| 2.0 * PI * i as f64 / big as f64).collect();
    let speed: Vec<f64> = tgrid.iter().map(|&t| param.speed(t)).collect();
    let vmax = speed.iter().fold(0.0f64, |a, &b| a.max(b));
    if let Some((i, v)) = speed.iter().enumerate().find(|(_, &v)| !(v > 1e-10 * vmax)) {
        return Err(GeometryError::NotImmersed { t: tgrid[i], speed: *v });
    }
    let coeffs = spectral::coefficients(&spectral::to_complex(&speed));
    let mean = coeffs[0].re;
    let length = 2.0 * PI * mean;
    // s(t) = mean·t + Σ_{k≠0} c_k (e^{ikt} − 1)/(ik), kept to significant modes.
    let modes: Vec<(f64, num_complex::Complex64)> = (1..big / 2)
        .flat_map(|k| [(k as f64, coeffs[k]), (-(k as f64), coeffs[big - k])])
        .filter(|(_, c)| c.norm() > 1e-17 * mean)
        .collect();
    let arclength = |t: f64| {
        let osc: f64 = modes
            .iter()
            .map(|(k, c)| {
                let e = num_complex::Complex64::from_polar(1.0, k * t) - 1.0;
                (c * e / num_complex::Complex64::new(0.0, *k)).re
            })
            .sum();
        mean * t + osc
    };

    let mut ts = Vec::with_capacity(n);
    for j in 0..n {
        let target = length * j as f64 / n as f64;
        let mut t = 2.0 * PI * j as f64 / n as f64;
        let mut ok = false;
        for _ in 0..60 {
            let step = (arclength(t) - target) / param.speed(t);
            t -= step;
            if step.abs() < 1e-15 * (1.0 + t.abs()) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(GeometryError::Reparameterization(j));
        }
        ts.push(t);
    }

    let mut points = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for &t in &ts {
        let (x, y) = param.eval(t);
        let sp = x.d1.hypot(y.d1);
        points.push([x.v, y.v]);
        tangent.push([x.d1 / sp, y.d1 / sp]);
        curvature.push((x.d1 * y.d2 - y.d1 * x.d2) / sp.powi(3));
    }
    let mut curve = BoundaryCurve {
        descriptor: descriptor.clone(),
        length,
        s: (0..n).map(|j| length * j as f64 / n as f64).collect(),
        normal: Vec::new(),
        points,
        tangent,
        curvature,
        delta: 0.0,
        reversed: false,
    };
    if curve.signed_area() < 0.0 {
        log::warn!("curve descriptor is clockwise; reversing orientation");
        // s ↦ L − s: node j takes the point of node (n − j) mod n.
        let rev = |v: &Vec<[f64; 2]>| (0..n).map(|j| v[(n - j) % n]).collect::<Vec<_>>();
        curve.points = rev(&curve.points);
        curve.tangent = rev(&curve.tangent).into_iter().map(|t| [-t[0], -t[1]]).collect();
        curve.curvature = (0..n).map(|j| -curve.curvature[(n - j) % n]).collect();
        curve.reversed = true;
    }
    curve.normal = curve.tangent.iter().map(|t| [t[1], -t[0]]).collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (curve.points[i], curve.points[(i + 1) % n]);
            let (c, d) = (curve.points[j], curve.points[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return Err(GeometryError::SelfIntersecting(i, j));
            }
        }
    }
    curve.delta = 0.5 / curve.max_abs_curvature();
    Ok(curve)
}

/// ⟨f⟩ = (1/L)∫_Γ f by the trapezoid rule on the arclength grid.
pub fn boundary_mean(f: &[f64], curve: &BoundaryCurve) -> Result<f64> {
    if f.len() != curve.len() {
        return Err(GeometryError::GridMismatch { expected: curve.len(), got: f.len() });
    }
    Ok(spectral::mean(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let c = CurveDescriptor::Circle { radius: 1.0 };
        assert!(build_curve(&c, 32).is_err());
        assert!(build_curve(&c, 100).is_err());
        assert!(build_curve(&c, 64).is_ok());
    }

    #[test]
    fn unit_circle() {
        let c = build_curve(&CurveDescriptor::Circle { radius: 1.0 }, 128).unwrap();
        assert!((c.length - 2.0 * PI).abs() < 1e-12);
        assert!(c.curvature.iter().all(|k| (k - 1.0).abs() < 1e-12));
        assert!((c.delta - 0.5).abs() < 1e-12);
        for (j, p) in c.points.iter().enumerate() {
            let s = c.s[j];
            assert!((p[0] - s.cos()).abs() < 1e-12 && (p[1] - s.sin()).abs() < 1e-12);
            let nn = c.normal[j];
            assert!((nn[0] - s.cos()).abs() < 1e-12 && (nn[1] - s.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn peanut_has_length_two_pi() {
        let c = build_curve(&CurveDescriptor::Peanut {}, 256).unwrap();
        assert!((c.length - 2.0 * PI).abs() < 1e-10);
        assert!(c.signed_area() > 0.0);
        assert!(c.delta < 1.0 / c.max_abs_curvature());
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let d = CurveDescriptor::Parametric {
            x_cos: vec![0.0, 2.0],
            x_sin: vec![],
            y_cos: vec![],
            y_sin: vec![0.0, -1.0],
        };
        let c = build_curve(&d, 128).unwrap();
        assert!(c.reversed);
        assert!(c.signed_area() > 0.0);
        assert!(c.curvature.iter().all(|k| *k > 0.0));
        let e = build_curve(&CurveDescriptor::Ellipse { a: 2.0, b: 1.0 }, 128).unwrap();
        assert!((c.length - e.length).abs() < 1e-13);
    }

    #[test]
    fn figure_eight_is_rejected() {
        let d = CurveDescriptor::Parametric {
            x_cos: vec![0.0, 0.1f64.sin()],
            x_sin: vec![0.0, 0.1f64.cos()],
            y_cos: vec![0.0, 0.0, 0.5 * 0.2f64.sin()],
            y_sin: vec![0.0, 0.0, 0.5 * 0.2f64.cos()],
        };
        assert!(matches!(build_curve(&d, 128), Err(GeometryError::SelfIntersecting(..))));
    }

    #[test]
    fn degenerate_curves_are_rejected() {
        let cusp = CurveDescriptor::Parametric {
            x_cos: vec![0.0, 0.0, 0.0, 0.0],
            x_sin: vec![0.0, 3.0, 0.0, -1.0],
            y_cos: vec![0.0, 3.0, 0.0, 1.0],
            y_sin: vec![],
        };
        assert!(build_curve(&cusp, 128).is_err());
        assert!(build_curve(&CurveDescriptor::Circle { radius: -1.0 }, 64).is_err());
    }

    #[test]
    fn means() {
        let c = build_curve(&CurveDescriptor::Peanut {}, 128).unwrap();
        assert_eq!(boundary_mean(&vec![2.5; 128], &c).unwrap(), 2.5);
        let f: Vec<f64> = c.s.iter().map(|s| (2.0 * PI * s / c.length).cos()).collect();
        assert!(boundary_mean(&f, &c).unwrap().abs() < 1e-15);
        let k = boundary_mean(&c.curvature, &c).unwrap();
        assert!((k - 2.0 * PI / c.length).abs() < 1e-12);
        assert!(boundary_mean(&[1.0; 64], &c).is_err());
    }

    #[test]
    fn unit_speed_on_the_grid() {
        let c = build_curve(&CurveDescriptor::Peanut {}, 256).unwrap();
        let dx = spectral::derivative(&c.points.iter().map(|p| p[0]).collect::<Vec<_>>(), c.length);
        let dy = spectral::derivative(&c.points.iter().map(|p| p[1]).collect::<Vec<_>>(), c.length);
        for (a, b) in dx.iter().zip(&dy) {
            assert!((a.hypot(*b) - 1.0).abs() < 1e-10);
        }
    }
}
