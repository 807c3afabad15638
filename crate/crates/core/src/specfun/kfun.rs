//! K_n for Re z ≥ 0 (series for |z| ≤ 2, Steed/Temme continued fraction
//! otherwise, forward recurrence in n), and H⁽¹⁾_n built on it.

use super::jfun;
use super::scaled::{ldexp, Scaled};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_BITS: i64 = 830;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// (K_0, K_1) from the ascending series with logarithm.
fn k01_series(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z / 4.0;
    let lnhalf = (z / 2.0).ln();
    // I_0, I_1 and the digamma-weighted companions
    let mut t0 = c(1.0, 0.0);
    let mut t1 = c(1.0, 0.0);
    let mut i0 = t0;
    let mut i1 = t1;
    let mut hk = 0.0; // harmonic number H_k
    let mut psi_sum0 = c(-EULER_GAMMA, 0.0);
    // ψ(1) + ψ(2) = −2γ + 1
    let mut psi_sum1 = c(1.0 - 2.0 * EULER_GAMMA, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        i0 += t0;
        i1 += t1;
        psi_sum0 += t0 * (hk - EULER_GAMMA);
        // ψ(k+1) + ψ(k+2) = H_k + H_{k+1} − 2γ
        psi_sum1 += t1 * (hk + hk + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if t0.norm() < 1e-18 * i0.norm() && t1.norm() < 1e-18 * i1.norm() {
            break;
        }
    }
    let i1 = i1 * z / 2.0;
    let k0 = -lnhalf * i0 + psi_sum0;
    let k1 = z.inv() + lnhalf * i1 - z / 4.0 * psi_sum1;
    (k0, k1)
}

/// (K_0, K_1) · e^{z} from Steed's continued fraction, |z| > 2.
fn k01_cf2(z: Complex64) -> (Complex64, Complex64) {
    let mut b = 2.0 * (1.0 + z);
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = c(0.0, 0.0);
    let mut q2 = c(1.0, 0.0);
    let a1 = 0.25;
    let mut q = c(a1, 0.0);
    let mut cc = c(a1, 0.0);
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        cc = -a * cc / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += cc * qnew;
        b += 2.0;
        d = (b + a * d).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

/// K_k(z) for k in 0..=hi, Re z ≥ 0, z ≠ 0, scaled.
pub(crate) fn k_values(hi: usize, z: Complex64) -> Vec<Scaled> {
    let (k0, k1, base) = if z.norm() <= 2.0 {
        let (a, b) = k01_series(z);
        (a, b, Scaled::from_complex(Complex64::new(1.0, 0.0)))
    } else {
        let (a, b) = k01_cf2(z);
        // restore e^{−z}: modulus e^{−Re z}, phase −Im z
        let ph = Complex64::from_polar(1.0, -z.im);
        (a * ph, b * ph, Scaled::exp_real(-z.re))
    };
    let mut out = Vec::with_capacity(hi + 1);
    out.push(Scaled::from_complex(k0) * base);
    if hi == 0 {
        return out;
    }
    out.push(Scaled::from_complex(k1) * base);
    let (big, small) = (ldexp(1.0, RESCALE_BITS), ldexp(1.0, -RESCALE_BITS));
    let zinv = z.inv();
    let mut prev = k0;
    let mut cur = k1;
    let mut shift = 0i64;
    for n in 1..hi {
        let next = prev + 2.0 * n as f64 * zinv * cur;
        prev = cur;
        cur = next;
        if cur.norm() > big {
            cur *= small;
            prev *= small;
            shift += RESCALE_BITS;
        }
        out.push(Scaled::new(cur, shift) * base);
    }
    out
}

/// (K_{n−1}, K_n, K_{n+1}) with K_{−1} = K_1.
pub(crate) fn k_triple(n: usize, z: Complex64) -> [Scaled; 3] {
    let v = k_values(n + 1, z);
    let km1 = if n == 0 { v[1] } else { v[n - 1] };
    [km1, v[n], v[n + 1]]
}

fn i_pow(p: i64) -> Complex64 {
    match p.rem_euclid(4) {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

/// Scaled (H⁽¹⁾_n(w), H⁽¹⁾_n'(w)) for Im w ≥ 0, n ≥ 0 through
/// H⁽¹⁾_n(w) = (2/π) i^{−(n+1)} K_n(−iw). The two share one exponent.
pub(crate) fn hankel_upper(n: usize, w: Complex64) -> (Scaled, Scaled) {
    let zk = c(0.0, -1.0) * w;
    let [km1, k0, kp1] = k_triple(n, zk);
    let pre = i_pow(-(n as i64 + 1)) * (2.0 / PI);
    let val = k0.scale(pre);
    // K_n' = −(K_{n−1} + K_{n+1})/2 and d/dw = −i d/dz
    let dk = km1.add(kp1).scale(c(-0.5, 0.0));
    let der = dk.scale(pre * c(0.0, -1.0));
    (val, der)
}

/// Scaled (H⁽¹⁾_n, H⁽¹⁾_n') for any w off the closed negative real axis.
pub(crate) fn hankel_pair(n: usize, w: Complex64) -> (Scaled, Scaled) {
    if w.im >= 0.0 {
        return hankel_upper(n, w);
    }
    // reflection: H⁽¹⁾_n(w) = 2 J_n(w) − conj(H⁽¹⁾_n(w̄))
    let (hv, hd) = hankel_upper(n, w.conj());
    let [jm1, j0, jp1] = jfun::j_triple(n, w);
    let jd = if n == 0 {
        -jp1
    } else {
        jm1.sub(jp1).scale(c(0.5, 0.0))
    };
    let val = j0.scale(c(2.0, 0.0)).sub(hv.conj());
    let der = jd.scale(c(2.0, 0.0)).sub(hd.conj());
    (val, der)
}

/// H⁽¹⁾_k(w), k = 0..=hi, for Im w ≥ 0 (scaled, from one K recurrence).
pub(crate) fn hankel_values_upper(hi: usize, w: Complex64) -> Vec<Scaled> {
    let zk = c(0.0, -1.0) * w;
    k_values(hi, zk)
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.scale(i_pow(-(k as i64 + 1)) * (2.0 / PI)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_cf2_agree_on_circle_of_radius_two() {
        for &z in &[c(2.0, 0.0), c(1.2, 1.6), c(0.0, 2.0), c(1.9, -0.6)] {
            let (a0, a1) = k01_series(z);
            let (b0, b1) = k01_cf2(z);
            let e = (-z).exp();
            assert!((a0 - b0 * e).norm() < 1e-14 * a0.norm(), "{z}");
            assert!((a1 - b1 * e).norm() < 1e-14 * a1.norm(), "{z}");
        }
    }

    #[test]
    fn k0_reference_value() {
        // K_0(1) = 0.42102443824070833
        let v = k_values(0, c(1.0, 0.0))[0].value();
        assert!((v.re - 0.421_024_438_240_708_3).abs() < 1e-15);
    }
}
