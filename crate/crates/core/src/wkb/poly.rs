//! Polynomials in σ with grid-function coefficients, always understood as
//! multiplying a side's boundary-layer exponential E = e^{d(s)σ}.

use crate::geometry::spectral;
use num_complex::Complex64;

pub type GridFn = Vec<Complex64>;

pub(crate) fn zeros(n: usize) -> GridFn {
    vec![Complex64::new(0.0, 0.0); n]
}

pub(crate) fn real_grid(v: &[f64]) -> GridFn {
    spectral::to_complex(v)
}

/// Σ_k c_k(s) σ^k.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaPoly {
    pub n: usize,
    pub c: Vec<GridFn>,
}

impl SigmaPoly {
    pub fn zero(n: usize) -> Self {
        SigmaPoly { n, c: Vec::new() }
    }

    pub fn constant(f: GridFn) -> Self {
        SigmaPoly { n: f.len(), c: vec![f] }
    }

    /// f(s) σ^k.
    pub fn monomial(f: GridFn, k: usize) -> Self {
        let n = f.len();
        let mut c = vec![zeros(n); k];
        c.push(f);
        SigmaPoly { n, c }
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.iter().rposition(|g| g.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn coeff(&self, k: usize) -> GridFn {
        self.c.get(k).cloned().unwrap_or_else(|| zeros(self.n))
    }

    pub fn add(&self, o: &SigmaPoly) -> SigmaPoly {
        let len = self.c.len().max(o.c.len());
        let n = self.n.max(o.n);
        let c = (0..len)
            .map(|k| match (self.c.get(k), o.c.get(k)) {
                (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| x + y).collect(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => zeros(n),
            })
            .collect();
        SigmaPoly { n, c }
    }

    pub fn add_assign(&mut self, o: &SigmaPoly) {
        *self = self.add(o);
    }

    pub fn scale(&self, a: Complex64) -> SigmaPoly {
        SigmaPoly {
            n: self.n,
            c: self.c.iter().map(|g| g.iter().map(|z| z * a).collect()).collect(),
        }
    }

    pub fn mul_grid(&self, f: &[Complex64]) -> SigmaPoly {
        SigmaPoly {
            n: self.n,
            c: self.c.iter().map(|g| g.iter().zip(f).map(|(a, b)| a * b).collect()).collect(),
        }
    }

    pub fn mul(&self, o: &SigmaPoly) -> SigmaPoly {
        if self.c.is_empty() || o.c.is_empty() {
            return SigmaPoly::zero(self.n.max(o.n));
        }
        let n = self.n;
        let mut c = vec![zeros(n); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                for ((t, x), y) in c[i + j].iter_mut().zip(a).zip(b) {
                    *t += x * y;
                }
            }
        }
        SigmaPoly { n, c }
    }

    /// ∂_σ(q E) / E = q′ + d q.
    pub fn d_sigma(&self, d: &[f64]) -> SigmaPoly {
        let n = self.n;
        let mut c: Vec<GridFn> = (0..self.c.len()).map(|k| {
            self.c[k].iter().zip(d).map(|(z, dd)| z * *dd).collect()
        }).collect();
        for k in 1..self.c.len() {
            for (t, z) in c[k - 1].iter_mut().zip(&self.c[k]) {
                *t += z * k as f64;
            }
        }
        SigmaPoly { n, c }
    }

    /// ∂_s(q E) / E = ∂_s q + d′ σ q.
    pub fn d_s(&self, d_prime: &[Complex64], length: f64) -> SigmaPoly {
        let mut out = SigmaPoly {
            n: self.n,
            c: self.c.iter().map(|g| spectral::derivative_c(g, length)).collect(),
        };
        if !self.c.is_empty() {
            let mut shifted = vec![zeros(self.n)];
            shifted.extend(self.c.iter().map(|g| g.iter().zip(d_prime).map(|(a, b)| a * b).collect()));
            out.add_assign(&SigmaPoly { n: self.n, c: shifted });
        }
        out
    }

    /// q(s_j, σ) at one node.
    pub fn eval(&self, j: usize, sigma: f64) -> Complex64 {
        self.c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, g| acc * sigma + g[j])
    }
}

/// Truncated power series in h with σ-polynomial coefficients.
#[derive(Clone, Debug)]
pub(crate) struct HSeries(pub Vec<SigmaPoly>);

impl HSeries {
    pub fn mul(&self, o: &HSeries, order: usize) -> HSeries {
        let n = self.0[0].n;
        HSeries(
            (0..=order)
                .map(|k| {
                    let mut acc = SigmaPoly::zero(n);
                    for i in 0..=k {
                        if let (Some(a), Some(b)) = (self.0.get(i), o.0.get(k - i)) {
                            acc.add_assign(&a.mul(b));
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    /// 1/a for a series whose h⁰ term is a nowhere-zero grid function.
    pub fn reciprocal(&self, order: usize) -> HSeries {
        let n = self.0[0].n;
        let a0 = self.0[0].coeff(0);
        let inv0: GridFn = a0.iter().map(|z| 1.0 / z).collect();
        let mut b = vec![SigmaPoly::constant(inv0.clone())];
        for k in 1..=order {
            let mut acc = SigmaPoly::zero(n);
            for i in 1..=k {
                if let Some(a) = self.0.get(i) {
                    acc.add_assign(&a.mul(&b[k - i]));
                }
            }
            b.push(acc.mul_grid(&inv0).scale(Complex64::new(-1.0, 0.0)));
        }
        HSeries(b)
    }
}

/// Particular solution of (∂²_σ − d²)(qE) = pE with q(0) = 0, i.e.
/// q″ + 2d q′ = p solved from the top coefficient down.
pub fn ode_particular(d: &[f64], rhs: &SigmaPoly) -> SigmaPoly {
    let n = rhs.n;
    let top = match rhs.degree() {
        Some(k) => k,
        None => return SigmaPoly::zero(n),
    };
    let mut q = vec![zeros(n); top + 3];
    for k in (0..=top).rev() {
        let p = &rhs.c[k];
        for j in 0..n {
            let next = q[k + 2][j] * ((k + 2) * (k + 1)) as f64;
            q[k + 1][j] = (p[j] - next) / (2.0 * d[j] * (k + 1) as f64);
        }
    }
    q.truncate(top + 2);
    SigmaPoly { n, c: q }
}
