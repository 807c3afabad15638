//! Operator expansion tables and the order-by-order boundary-layer solve.

use super::poly::{ode_particular, real_grid, zeros, GridFn, HSeries, SigmaPoly};
use super::{Side, SigmaPolyExp, WkbError, WkbExpansion};
use crate::geometry::spectral;
use num_complex::Complex64;

/// Coefficients of g, g⁻¹, g⁻² and ε⁻¹ as series in h at fixed σ on one side.
#[derive(Clone, Debug)]
pub(crate) struct SideSeries {
    g: HSeries,
    ginv: HSeries,
    ginv2: HSeries,
    einv: HSeries,
}

impl SideSeries {
    pub fn new(side: Side, kappa: &[f64], eta: &[Vec<f64>], order: usize) -> SideSeries {
        let n = kappa.len();
        let mk = |f: &dyn Fn(usize, f64) -> f64| {
            HSeries(
                (0..=order)
                    .map(|k| SigmaPoly::monomial(kappa.iter().map(|&x| Complex64::new(f(k, x), 0.0)).collect(), k))
                    .collect(),
            )
        };
        let g = HSeries(vec![
            SigmaPoly::constant(real_grid(&vec![1.0; n])),
            SigmaPoly::monomial(real_grid(kappa), 1),
        ]);
        let ginv = mk(&|k, x| (-x).powi(k as i32));
        let ginv2 = mk(&|k, x| (k + 1) as f64 * (-x).powi(k as i32));
        let einv = match side {
            Side::Plus => HSeries(
                (0..=order)
                    .map(|k| if k == 0 { SigmaPoly::constant(real_grid(&vec![1.0; n])) } else { SigmaPoly::zero(n) })
                    .collect(),
            ),
            Side::Minus => {
                let mut fact = 1.0;
                let terms: Vec<SigmaPoly> = (0..=order)
                    .map(|k| {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        SigmaPoly::monomial(eta[k].iter().map(|v| Complex64::new(v / fact, 0.0)).collect(), k)
                    })
                    .collect();
                let e = HSeries(terms);
                let inv = e.mul(&e, order).reciprocal(order);
                HSeries(inv.0.iter().map(|p| p.scale(Complex64::new(-1.0, 0.0))).collect())
            }
        };
        SideSeries { g, ginv, ginv2, einv }
    }
}

/// h^n coefficients of the three operator families on one side. With
/// A_b, B_b coefficient polynomials (implicit E factor):
///
/// * 𝔒³_n(φ, θ, ϑ) = a3 φ θ′ ϑ′
/// * 𝔒²_n(φ, θ) = −i (l2_direct ∂_sφ θ′ + Σ A ∂_s(B φ θ′))
/// * 𝔒¹_n(φ) = −Σ A ∂_σ(B ∂_σφ) − Σ A ∂_s(B ∂_sφ)
#[derive(Clone, Debug)]
pub struct OperatorCoeffs {
    pub side: Side,
    pub n: usize,
    pub a3: SigmaPoly,
    pub l2_direct: SigmaPoly,
    pub l2_pairs: Vec<(SigmaPoly, SigmaPoly)>,
    pub l1_sigma: Vec<(SigmaPoly, SigmaPoly)>,
    pub l1_s: Vec<(SigmaPoly, SigmaPoly)>,
}

impl OperatorCoeffs {
    pub(crate) fn new(side: Side, s: &SideSeries, n: usize) -> OperatorCoeffs {
        let np = s.g.0[0].n;
        let ge = s.ginv2.mul(&s.einv, n);
        let ie = s.ginv.mul(&s.einv, n);
        let eg = s.einv.mul(&s.g, n);
        let pairs = |a: &HSeries, b: &HSeries, total: Option<usize>| match total {
            None => Vec::new(),
            Some(t) => (0..=t).map(|i| (a.0[i].clone(), b.0[t - i].clone())).collect(),
        };
        OperatorCoeffs {
            side,
            n,
            a3: ge.0[n].clone(),
            l2_direct: if n >= 1 { ge.0[n - 1].clone() } else { SigmaPoly::zero(np) },
            l2_pairs: pairs(&s.ginv, &ie, n.checked_sub(1)),
            l1_sigma: pairs(&s.ginv, &eg, Some(n)),
            l1_s: pairs(&s.ginv, &ie, n.checked_sub(2)),
        }
    }

    pub fn apply3(&self, phi: &SigmaPoly, t1: &[Complex64], t2: &[Complex64]) -> SigmaPoly {
        let tt: GridFn = t1.iter().zip(t2).map(|(a, b)| a * b).collect();
        self.a3.mul(phi).mul_grid(&tt)
    }

    pub fn apply2(&self, phi: &SigmaPoly, t: &[Complex64], d_prime: &[Complex64], length: f64) -> SigmaPoly {
        if self.n == 0 {
            return SigmaPoly::zero(phi.n);
        }
        let mut acc = self.l2_direct.mul(&phi.d_s(d_prime, length)).mul_grid(t);
        let pt = phi.mul_grid(t);
        for (a, b) in &self.l2_pairs {
            acc.add_assign(&a.mul(&b.mul(&pt).d_s(d_prime, length)));
        }
        acc.scale(Complex64::new(0.0, -1.0))
    }

    pub fn apply1(&self, phi: &SigmaPoly, d: &[f64], d_prime: &[Complex64], length: f64) -> SigmaPoly {
        let mut acc = SigmaPoly::zero(phi.n);
        let ps = phi.d_sigma(d);
        for (a, b) in &self.l1_sigma {
            acc.add_assign(&a.mul(&b.mul(&ps).d_sigma(d)));
        }
        if !self.l1_s.is_empty() {
            let pd = phi.d_s(d_prime, length);
            for (a, b) in &self.l1_s {
                acc.add_assign(&a.mul(&b.mul(&pd).d_s(d_prime, length)));
            }
        }
        acc.scale(Complex64::new(-1.0, 0.0))
    }

    /// 𝔒³_n(φ, θ, θ) + 𝔒²_n(φ, θ) + 𝔒¹_n(φ) is not needed as a whole by
    /// the hierarchy but is convenient for validation.
    pub fn apply_all(&self, phi: &SigmaPoly, t: &[Complex64], d: &[f64], d_prime: &[Complex64], length: f64) -> SigmaPoly {
        self.apply3(phi, t, t)
            .add(&self.apply2(phi, t, d_prime, length))
            .add(&self.apply1(phi, d, d_prime, length))
    }
}

/// Coefficient of h^n in 𝓛_h(Σφ_p h^p, Σθ_p h^p) − Λ Σφ_p h^p using every
/// order already stored in `exp` (orders ≥ stored count contribute zero).
pub(crate) fn order_coefficient(exp: &WkbExpansion, n: usize) -> [SigmaPoly; 2] {
    let known = exp.lambda.len();
    let np = exp.curve.len();
    let length = exp.curve.length;
    let mut out = [SigmaPoly::zero(np), SigmaPoly::zero(np)];
    for side in [Side::Minus, Side::Plus] {
        let si = side.index();
        let sd = &exp.sides[si];
        let mut acc = SigmaPoly::zero(np);
        for p1 in 0..=n {
            let op = &exp.ops[p1][si];
            for p2 in 0..(n - p1 + 1).min(known) {
                let phi = &exp.phi[p2][si].poly;
                let rest = n - p1 - p2;
                if p1 >= 1 && rest < known {
                    acc.add_assign(&op.apply2(phi, &exp.dtheta[rest], &sd.d_prime, length));
                }
                for p3 in 0..=rest {
                    let p4 = rest - p3;
                    if p3 < known && p4 < known {
                        acc.add_assign(&op.apply3(phi, &exp.dtheta[p3], &exp.dtheta[p4]));
                    }
                }
                if rest == 0 {
                    acc.add_assign(&op.apply1(phi, &sd.d, &sd.d_prime, length));
                }
            }
        }
        for p1 in 0..=n.min(known.saturating_sub(1)) {
            let p2 = n - p1;
            if p2 < known {
                acc.add_assign(&exp.phi[p2][si].poly.scale(Complex64::new(-exp.lambda[p1], 0.0)));
            }
        }
        out[si] = acc;
    }
    out
}

/// Solves (𝒫_n) given orders 0..n−1, appending φ_n^±, θ_n and λ_n.
pub(crate) fn solve_next(exp: &mut WkbExpansion) -> Result<(), WkbError> {
    let n = exp.lambda.len();
    if n == 0 {
        return Err(WkbError::Hierarchy { order: 0, reason: "order 0 missing".into() });
    }
    if n >= exp.ops.len() {
        return Err(WkbError::OrderUnavailable { requested: n, available: exp.ops.len() - 1 });
    }
    let np = exp.curve.len();
    let length = exp.curve.length;
    let f = order_coefficient(exp, n);
    let eta0 = exp.trace.eta0().to_vec();
    let e2: GridFn = eta0.iter().map(|e| Complex64::new(-e * e, 0.0)).collect();
    let dm = &exp.sides[Side::Minus.index()].d;
    let dp = &exp.sides[Side::Plus.index()].d;
    let part_m = ode_particular(dm, &f[0].mul_grid(&e2));
    let part_p = ode_particular(dp, &f[1]);
    let (pm, pp) = (part_m.coeff(1), part_p.coeff(1));
    let tp = &exp.dtheta[0];

    // Flux condition −η₀⁻²∂_σφ_n⁻ = ∂_σφ_n⁺ at σ = 0 is linear in (θ_n′, λ_n):
    // θ_n′ = λ_n a + b.
    let mut a = zeros(np);
    let mut b = zeros(np);
    for j in 0..np {
        let ie2 = 1.0 / (eta0[j] * eta0[j]);
        let k = tp[j] * (-ie2 / dm[j] - 1.0 / dp[j]);
        a[j] = Complex64::new(0.5 / dm[j] - 0.5 / dp[j], 0.0) / k;
        b[j] = (pp[j] + pm[j] * ie2) / k;
    }
    let lam = -spectral::mean_c(&b) / spectral::mean_c(&a);
    let dtheta: GridFn = a.iter().zip(&b).map(|(x, y)| lam * x + y).collect();
    if !lam.is_finite() || dtheta.iter().any(|z| !z.is_finite()) {
        return Err(WkbError::Hierarchy { order: n, reason: "non-finite value".into() });
    }
    let theta = spectral::antiderivative_c(&dtheta, length);

    let mut am = zeros(np);
    let mut ap = zeros(np);
    for j in 0..np {
        let e = eta0[j];
        am[j] = (2.0 * tp[j] * dtheta[j] + e * e * lam) / (2.0 * dm[j]);
        ap[j] = (2.0 * tp[j] * dtheta[j] - lam) / (2.0 * dp[j]);
    }
    let phi_m = part_m.add(&SigmaPoly::monomial(am, 1));
    let phi_p = part_p.add(&SigmaPoly::monomial(ap, 1));
    let rate = |d: &[f64]| d.iter().map(|x| x.abs()).collect::<Vec<_>>();
    exp.phi.push([
        SigmaPolyExp { side: Side::Minus, rate: rate(dm), poly: phi_m },
        SigmaPolyExp { side: Side::Plus, rate: rate(dp), poly: phi_p },
    ]);
    exp.lambda.push(lam.re);
    exp.lambda_imag.push(lam.im);
    exp.dtheta.push(dtheta);
    exp.theta.push(theta);
    Ok(())
}
