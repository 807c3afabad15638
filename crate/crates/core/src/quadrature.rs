//! Adaptive quadrature: Gauss–Kronrod (7/15) for vector-valued complex
//! integrands and Gauss–Legendre panels for real ones.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights on the odd Kronrod nodes 1,3,5 and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: Vec<Complex64>,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

fn gk15<F, E>(f: &mut F, a: f64, b: f64, weights: &[f64]) -> Result<Panel, E>
where
    F: FnMut(f64) -> Result<Vec<Complex64>, E>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let n = fc.len();
    let mut k: Vec<Complex64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<Complex64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        for i in 0..n {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..n {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).norm() * weights.get(i).copied().unwrap_or(1.0));
    }
    Ok(Panel {
        a,
        b,
        value: k,
        error: err,
    })
}

/// Globally adaptive G7/K15 on [a, b]. Component `i` of the error estimate is
/// multiplied by `weights[i]` (default 1) before comparing with `abs_tol`.
/// Panels are bisected largest-error first until the summed estimate is
/// below tolerance or `max_panels` is reached. Evaluation order depends only
/// on the inputs.
pub fn adaptive_gk15<F, E>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    weights: &[f64],
    max_panels: usize,
) -> Result<Integral, E>
where
    F: FnMut(f64) -> Result<Vec<Complex64>, E>,
{
    let mut panels = vec![gk15(&mut f, a, b, weights)?];
    let mut evals = 15;
    loop {
        let total: f64 = panels.iter().map(|p| p.error).sum();
        if total <= abs_tol || panels.len() >= max_panels {
            let n = panels[0].value.len();
            let mut value = vec![Complex64::new(0.0, 0.0); n];
            // sum in position order for reproducibility
            panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
            for p in &panels {
                for i in 0..n {
                    value[i] += p.value[i];
                }
            }
            return Ok(Integral {
                value,
                error: total,
                converged: total <= abs_tol,
                evaluations: evals,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(idx);
        let m = 0.5 * (p.a + p.b);
        panels.push(gk15(&mut f, p.a, m, weights)?);
        panels.push(gk15(&mut f, m, p.b, weights)?);
        evals += 30;
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Legendre rule needs at least two nodes");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// A reusable Gauss–Legendre rule.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussLegendre { nodes, weights }
    }

    pub fn panel<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    pub fn try_panel<F, E>(&self, f: &mut F, a: f64, b: f64) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x)?;
        }
        Ok(s * h)
    }

    /// Adaptive bisection: a panel is accepted when its value agrees with
    /// the sum of its halves to within its share of `abs_tol`.
    pub fn adaptive<F: FnMut(f64) -> f64>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        abs_tol: f64,
        max_depth: u32,
    ) -> f64 {
        let mut g = |x: f64| Ok::<f64, ()>(f(x));
        self.try_adaptive(&mut g, a, b, abs_tol, 0.0, max_depth).unwrap()
    }

    /// Fallible [`GaussLegendre::adaptive`] with tolerance
    /// max(abs_tol, rel_tol · |first estimate|).
    pub fn try_adaptive<F, E>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        abs_tol: f64,
        rel_tol: f64,
        max_depth: u32,
    ) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let whole = self.try_panel(f, a, b)?;
        let tol = abs_tol.max(rel_tol * whole.abs());
        self.recurse(f, a, b, whole, tol, max_depth)
    }

    fn recurse<F, E>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let m = 0.5 * (a + b);
        let left = self.try_panel(f, a, m)?;
        let right = self.try_panel(f, m, b)?;
        if depth == 0 || (left + right - whole).abs() <= tol {
            return Ok(left + right);
        }
        Ok(self.recurse(f, a, m, left, 0.5 * tol, depth - 1)?
            + self.recurse(f, m, b, right, 0.5 * tol, depth - 1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let v = gl.panel(&mut |x: f64| x.powi(15) + 3.0 * x.powi(14), -1.0, 1.0);
        assert!((v - 6.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_legendre_resolves_a_spike() {
        let gl = GaussLegendre::new(16);
        let eps: f64 = 1e-3;
        let v = gl.adaptive(&mut |x: f64| eps / (x * x + eps * eps), -1.0, 1.0, 1e-12, 60);
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn kronrod_complex_exponential() {
        let r = adaptive_gk15::<_, ()>(
            |t| Ok(vec![Complex64::new(0.0, t).exp()]),
            0.0,
            std::f64::consts::TAU,
            1e-13,
            &[],
            100,
        )
        .unwrap();
        assert!(r.converged);
        assert!(r.value[0].norm() < 1e-13);
    }
}
