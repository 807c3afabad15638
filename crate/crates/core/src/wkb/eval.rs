//! Quasi-mode evaluation and residual diagnostics with unexpanded
//! coefficients.

use super::poly::{GridFn, SigmaPoly};
use super::{Result, Side, WkbError, WkbExpansion};
use crate::geometry::spectral;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smooth cutoff: 1 on [−δ/2, δ/2], 0 outside (−δ, δ), blended with
/// ψ(t) = exp(−1/t).
pub fn cutoff(xi: f64, delta: f64) -> f64 {
    let a = xi.abs();
    if a <= 0.5 * delta {
        return 1.0;
    }
    if a >= delta {
        return 0.0;
    }
    let t = (a - 0.5 * delta) / (0.5 * delta);
    let psi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (p, q) = (psi(1.0 - t), psi(t));
    p / (p + q)
}

fn check_order(exp: &WkbExpansion, order: usize) -> Result<()> {
    if order > exp.order() {
        return Err(WkbError::OrderUnavailable { requested: order, available: exp.order() });
    }
    Ok(())
}

fn check_m(m: i32) -> Result<()> {
    if m < 1 {
        return Err(WkbError::InvalidInput(format!("mode index m = {m} must be ≥ 1")));
    }
    Ok(())
}

/// Σ_{n ≤ order} hⁿ φ_n on one side, as a single polynomial.
fn summed_profile(exp: &WkbExpansion, side: Side, h: f64, order: usize) -> SigmaPoly {
    let mut acc = SigmaPoly::zero(exp.curve.len());
    for n in 0..=order {
        acc.add_assign(&exp.phi[n][side.index()].poly.scale(Complex64::new(h.powi(n as i32), 0.0)));
    }
    acc
}

/// Σ_{n ≤ order} hⁿ θ_n on the grid.
fn summed_phase(exp: &WkbExpansion, h: f64, order: usize) -> GridFn {
    let mut out = exp.theta[0].clone();
    for n in 1..=order {
        let w = h.powi(n as i32);
        for (o, t) in out.iter_mut().zip(&exp.theta[n]) {
            *o += t * w;
        }
    }
    out
}

/// u̲_m at the grid nodes for each offset ξ: `out[i][j]` is the value at
/// (s_j, xis[i]).
pub fn quasimode_on_grid(exp: &WkbExpansion, m: i32, order: usize, xis: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    check_order(exp, order)?;
    check_m(m)?;
    let delta = exp.curve.delta;
    if let Some(&xi) = xis.iter().find(|x| x.abs() >= delta) {
        return Err(WkbError::OutOfCollar { xi, delta });
    }
    let h = exp.h(m);
    let phase = summed_phase(exp, h, order);
    let polys = [summed_profile(exp, Side::Minus, h, order), summed_profile(exp, Side::Plus, h, order)];
    let n = exp.curve.len();
    Ok(xis
        .iter()
        .map(|&xi| {
            let side = if xi < 0.0 { Side::Minus } else { Side::Plus };
            let si = side.index();
            let sigma = xi / h;
            let chi = cutoff(xi, delta);
            (0..n)
                .map(|j| {
                    let e = (exp.sides[si].d[j] * sigma).exp();
                    chi * (Complex64::i() * phase[j] / h).exp() * polys[si].eval(j, sigma) * e
                })
                .collect()
        })
        .collect())
}

/// u̲_m(s, ξ) = χ(ξ) e^{iΘ(s)/h} Φ^±(s, ξ/h) at arbitrary (s, ξ), using
/// trigonometric interpolation of the periodic parts in s.
pub fn quasimode_eval(exp: &WkbExpansion, m: i32, order: usize, points: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    check_order(exp, order)?;
    check_m(m)?;
    let delta = exp.curve.delta;
    if let Some(&(_, xi)) = points.iter().find(|p| p.1.abs() >= delta) {
        return Err(WkbError::OutOfCollar { xi, delta });
    }
    let l = exp.curve.length;
    let h = exp.h(m);
    let dir = if exp.conjugate { -1.0 } else { 1.0 };
    // Θ − dir·s is periodic.
    let mut phase = summed_phase(exp, h, order);
    for (p, s) in phase.iter_mut().zip(&exp.curve.s) {
        *p -= dir * s;
    }
    let phase_c = spectral::coefficients(&phase);
    let interp = |g: &[Complex64]| spectral::coefficients(g);
    let sides: Vec<(Vec<GridFn>, GridFn)> = [Side::Minus, Side::Plus]
        .iter()
        .map(|&side| {
            let p = summed_profile(exp, side, h, order);
            let d = spectral::to_complex(&exp.sides[side.index()].d);
            (p.c.iter().map(|g| interp(g)).collect(), interp(&d))
        })
        .collect();
    Ok(points
        .par_iter()
        .map(|&(s, xi)| {
            let (coeffs, dc) = &sides[if xi < 0.0 { 0 } else { 1 }];
            let sigma = xi / h;
            let theta = spectral::interpolate_c(&phase_c, l, s) + dir * s;
            let d = spectral::interpolate_c(dc, l, s).re;
            let q = coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * sigma + spectral::interpolate_c(c, l, s));
            cutoff(xi, delta) * (Complex64::i() * theta / h).exp() * q * (d * sigma).exp()
        })
        .collect())
}

/// Winding number of s ↦ u̲_m(s, 0) along the grid.
pub fn winding_number(exp: &WkbExpansion, m: i32, order: usize) -> Result<i64> {
    let u = quasimode_on_grid(exp, m, order, &[0.0])?.remove(0);
    let n = u.len();
    let total: f64 = (0..n).map(|j| (u[(j + 1) % n] / u[j]).arg()).sum();
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Sup-norms over the collar plateau |ξ| ≤ δ/2 of h⁻²(𝓛_h w − Λw) (that is,
/// P u̲ − λ̲ u̲ without the phase), and of the jumps of w and ε⁻¹∂_ξ w.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub m: i32,
    pub order: usize,
    pub pde: f64,
    pub jump0: f64,
    pub jump1: f64,
}

/// Pointwise 𝓛_h[ε](w, θ) − Λ w on one side at the nodes, for a profile
/// polynomial `w` (implicit e^{dσ}) and phase derivative `dtheta`, with
/// g = 1 + hσκ and ε evaluated from the permittivity field.
pub(crate) fn full_operator(
    exp: &WkbExpansion,
    side: Side,
    h: f64,
    w: &SigmaPoly,
    dtheta: &[Complex64],
    big_lambda: f64,
    sigma: f64,
) -> Vec<Complex64> {
    let c = &exp.curve;
    let n = c.len();
    let l = c.length;
    let sd = &exp.sides[side.index()];
    let step = 1e-5 * l;
    let xi = h * sigma;
    let (a, a_xi): (Vec<f64>, Vec<f64>) = match side {
        Side::Plus => (vec![1.0; n], vec![0.0; n]),
        Side::Minus => (0..n)
            .map(|j| {
                let x = c.tubular_point(j, xi);
                let eps = exp.profile.eval(x);
                let de = exp.profile.directional_derivative(x, c.normal[j], step);
                (1.0 / eps, -de / (eps * eps))
            })
            .unzip(),
    };
    let g: Vec<f64> = c.curvature.iter().map(|k| 1.0 + xi * k).collect();
    let cg: Vec<f64> = a.iter().zip(&g).map(|(a, g)| a / g).collect();
    let dcg = spectral::derivative(&cg, l);
    let ddtheta = spectral::derivative_c(dtheta, l);

    let ws = w.d_sigma(&sd.d);
    let wss = ws.d_sigma(&sd.d);
    let wt = w.d_s(&sd.d_prime, l);
    let wtt = wt.d_s(&sd.d_prime, l);
    let i = Complex64::i();
    (0..n)
        .map(|j| {
            let e = (sd.d[j] * sigma).exp();
            let (v, vs, vss, vt, vtt) = (
                w.eval(j, sigma) * e,
                ws.eval(j, sigma) * e,
                wss.eval(j, sigma) * e,
                wt.eval(j, sigma) * e,
                wtt.eval(j, sigma) * e,
            );
            let (aj, gj, tj) = (a[j], g[j], dtheta[j]);
            let l3 = aj / (gj * gj) * v * tj * tj;
            let l2 = -i * h * (aj / (gj * gj) * vt * tj + (dcg[j] * v * tj + cg[j] * (vt * tj + v * ddtheta[j])) / gj);
            let d_ag = h * (a_xi[j] * gj + aj * c.curvature[j]);
            let l1 = -(d_ag * vs + aj * gj * vss) / gj - h * h * (dcg[j] * vt + cg[j] * vtt) / gj;
            l3 + l2 + l1 - big_lambda * v
        })
        .collect()
}

pub fn wkb_residual(exp: &WkbExpansion, m: i32, order: usize) -> Result<Residual> {
    check_order(exp, order)?;
    check_m(m)?;
    let h = exp.h(m);
    let n = exp.curve.len();
    let mut dtheta = exp.dtheta[0].clone();
    for k in 1..=order {
        let w = h.powi(k as i32);
        for (o, t) in dtheta.iter_mut().zip(&exp.dtheta[k]) {
            *o += t * w;
        }
    }
    let big_lambda = exp.big_lambda(h, order);
    let polys = [summed_profile(exp, Side::Minus, h, order), summed_profile(exp, Side::Plus, h, order)];
    let samples = 64;
    let mut jobs = Vec::new();
    for side in [Side::Minus, Side::Plus] {
        let rate_min = exp.phi[0][side.index()].rate.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let smax = (0.5 * exp.curve.delta / h).min(50.0 / rate_min);
        let sgn = if side == Side::Minus { -1.0 } else { 1.0 };
        for k in 1..=samples {
            jobs.push((side, sgn * smax * k as f64 / samples as f64));
        }
    }
    let pde = jobs
        .par_iter()
        .map(|&(side, sigma)| {
            full_operator(exp, side, h, &polys[side.index()], &dtheta, big_lambda, sigma)
                .iter()
                .fold(0.0f64, |a, z| a.max(z.norm()))
        })
        .reduce(|| 0.0, f64::max)
        / (h * h);
    let (mut jump0, mut jump1) = (0.0f64, 0.0f64);
    let dm = polys[0].d_sigma(&exp.sides[0].d);
    let dp = polys[1].d_sigma(&exp.sides[1].d);
    for j in 0..n {
        jump0 = jump0.max((polys[0].eval(j, 0.0) - polys[1].eval(j, 0.0)).norm());
        let eps = exp.profile.eval(exp.curve.points[j]);
        jump1 = jump1.max((dm.eval(j, 0.0) / eps - dp.eval(j, 0.0)).norm() / h);
    }
    Ok(Residual { m, order, pde, jump0, jump1 })
}
