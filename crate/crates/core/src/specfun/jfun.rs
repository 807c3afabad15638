//! J_n and I_n: ascending series near the origin, Miller backward recurrence
//! elsewhere, normalised by the generating-function identity
//! e^{∓iz} = J_0 + 2 Σ (∓i)^k J_k.

use super::scaled::Scaled;
use num_complex::Complex64;

// rescaling by an exact power of two keeps the recurrence bit-faithful
const RESCALE_BITS: i64 = 830;

fn rescale_at() -> f64 {
    super::scaled::ldexp(1.0, RESCALE_BITS)
}

fn rescale_by() -> f64 {
    super::scaled::ldexp(1.0, -RESCALE_BITS)
}

/// Whether the ascending series is used for the triple (n−1, n, n+1).
pub(crate) fn use_series(n: usize, z: Complex64) -> bool {
    z.norm_sqr() <= 2.0 * (n as f64 + 1.0)
}

/// J_n(z) from the ascending series, scaled.
pub(crate) fn j_series(n: usize, z: Complex64) -> Scaled {
    if z.norm() == 0.0 {
        return if n == 0 {
            Scaled::from_complex(Complex64::new(1.0, 0.0))
        } else {
            Scaled::ZERO
        };
    }
    let q = -z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..500 {
        term *= q / ((k * (n + k)) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    // (z/2)^n / n!
    let half = z / 2.0;
    let mut pre = Scaled::from_complex(Complex64::new(1.0, 0.0));
    for k in 1..=n {
        pre = pre.scale(half / k as f64);
    }
    pre.scale(sum)
}

fn start_order(hi: usize, z: Complex64) -> usize {
    let top = (hi as f64).max(z.norm().ceil());
    let s = top + 24.0 + (160.0 * top).sqrt();
    let mut n = s as usize;
    if n % 2 == 1 {
        n += 1;
    }
    n.max(hi + 4)
}

/// J_k(z) for k in lo..=hi by Miller's algorithm. `z` must be nonzero.
pub(crate) fn miller_j(lo: usize, hi: usize, z: Complex64) -> Vec<Scaled> {
    debug_assert!(lo <= hi && z.norm() > 0.0);
    let upper = z.im >= 0.0;
    let w = if upper {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let start = start_order(hi, z);
    let zinv = z.inv();
    let mut stored: Vec<(Complex64, u32)> = vec![(Complex64::new(0.0, 0.0), 0); hi - lo + 1];
    let mut count: u32 = 0;
    let (big, small) = (rescale_at(), rescale_by());
    let mut y_next = Complex64::new(0.0, 0.0);
    let mut y = Complex64::new(1e-300, 0.0);
    // w^k for the normalisation sum, cycled with period 4
    let wpow = |k: usize| -> Complex64 {
        match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => w,
            2 => Complex64::new(-1.0, 0.0),
            _ => -w,
        }
    };
    let mut sum = 2.0 * wpow(start) * y;
    if start <= hi && start >= lo {
        stored[start - lo] = (y, 0);
    }
    let mut k = start;
    while k > 0 {
        let y_prev = 2.0 * k as f64 * zinv * y - y_next;
        y_next = y;
        y = y_prev;
        k -= 1;
        if k > 0 {
            sum += 2.0 * wpow(k) * y;
        } else {
            sum += y;
        }
        if k >= lo && k <= hi {
            stored[k - lo] = (y, count);
        }
        if y.norm() > big {
            y *= small;
            y_next *= small;
            sum *= small;
            count += 1;
        }
    }
    // normalisation value e^{±iz}: modulus e^{|Im z|}, phase ∓Re z
    let (ln_norm, phase) = if upper {
        (z.im, Complex64::from_polar(1.0, -z.re))
    } else {
        (-z.im, Complex64::from_polar(1.0, z.re))
    };
    let norm = Scaled::exp_real(ln_norm).scale(phase) / Scaled::from_complex(sum);
    stored
        .into_iter()
        .map(|(v, c)| {
            if v.norm() == 0.0 {
                return Scaled::ZERO;
            }
            let drop = (count - c) as i64 * RESCALE_BITS;
            Scaled::new(v, -drop) * norm
        })
        .collect()
}

/// (J_{n−1}, J_n, J_{n+1}) for n ≥ 0 with J_{−1} = −J_1.
pub(crate) fn j_triple(n: usize, z: Complex64) -> [Scaled; 3] {
    if use_series(n, z) {
        let jn = j_series(n, z);
        let jn1 = j_series(n + 1, z);
        let jm1 = if n == 0 {
            -jn1
        } else if z.norm() == 0.0 {
            if n == 1 {
                Scaled::from_complex(Complex64::new(1.0, 0.0))
            } else {
                Scaled::ZERO
            }
        } else {
            jn.scale(2.0 * n as f64 / z).sub(jn1)
        };
        [jm1, jn, jn1]
    } else if n == 0 {
        let v = miller_j(0, 1, z);
        [-v[1], v[0], v[1]]
    } else {
        let v = miller_j(n - 1, n + 1, z);
        [v[0], v[1], v[2]]
    }
}

/// Plain values J_0..=J_max; entries that underflow are returned as zero.
pub(crate) fn j_values(max: usize, z: Complex64) -> Vec<Scaled> {
    if z.norm() == 0.0 {
        let mut v = vec![Scaled::ZERO; max + 1];
        v[0] = Scaled::from_complex(Complex64::new(1.0, 0.0));
        return v;
    }
    miller_j(0, max, z)
}
