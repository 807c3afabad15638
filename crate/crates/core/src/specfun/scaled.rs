//! Complex numbers carried as `mantissa · 2^exponent`.
//!
//! Recurrences at large order overflow `f64` long before the quantities of
//! interest (ratios, logarithmic derivatives) do, so the kernels work in this
//! representation and only convert at the public boundary. The exponent is an
//! integer power of two, so rescaling never introduces rounding.

use num_complex::Complex64;
use std::ops::{Div, Mul, Neg};

/// `mant · 2^exp`; a zero mantissa represents zero whatever `exp` is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub exp: i64,
}

/// Exact multiplication by 2^e (saturating to 0/inf outside the range).
pub fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= f64::from_bits(((1000 + 1023) as u64) << 52);
        e -= 1000;
    }
    while e < -1000 {
        x *= f64::from_bits(((1023 - 1000) as u64) << 52);
        e += 1000;
    }
    x * f64::from_bits(((e + 1023) as u64) << 52)
}

fn cldexp(z: Complex64, e: i64) -> Complex64 {
    Complex64::new(ldexp(z.re, e), ldexp(z.im, e))
}

/// Binary exponent e with 2^e ≤ x < 2^{e+1}, for finite x > 0.
fn ilogb(x: f64) -> i64 {
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal
        return ilogb(x * 2f64.powi(64)) - 64;
    }
    raw - 1023
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mant: Complex64 { re: 0.0, im: 0.0 },
        exp: 0,
    };

    pub fn new(mant: Complex64, exp: i64) -> Self {
        Scaled { mant, exp }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Scaled { mant: z, exp: 0 }.normalized()
    }

    /// e^x for real x, without overflow.
    pub fn exp_real(x: f64) -> Self {
        if x.abs() < 700.0 {
            return Scaled::from_complex(Complex64::new(x.exp(), 0.0));
        }
        let n = (x / std::f64::consts::LN_2).floor();
        let r = x - n * std::f64::consts::LN_2;
        Scaled::new(Complex64::new(r.exp(), 0.0), n as i64)
    }

    /// Bring the larger component of the mantissa into [1, 2).
    pub fn normalized(self) -> Self {
        let m = self.mant.re.abs().max(self.mant.im.abs());
        if m == 0.0 || !m.is_finite() {
            return self;
        }
        let e = ilogb(m);
        Scaled {
            mant: cldexp(self.mant, -e),
            exp: self.exp + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == Complex64::new(0.0, 0.0)
    }

    /// ln|value|, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mant.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
        }
    }

    /// Plain complex value; may be infinite or flush to zero.
    pub fn value(&self) -> Complex64 {
        cldexp(self.mant, self.exp)
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let m = self.exp.max(other.exp);
        Scaled::new(self.mant_at(m) + other.mant_at(m), m)
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(-other)
    }

    pub fn conj(self) -> Scaled {
        Scaled {
            mant: self.mant.conj(),
            exp: self.exp,
        }
    }

    pub fn scale(self, c: Complex64) -> Scaled {
        Scaled::new(self.mant * c, self.exp)
    }

    /// Mantissa m with value = m·2^exp.
    pub fn mant_at(&self, exp: i64) -> Complex64 {
        if self.is_zero() {
            return self.mant;
        }
        cldexp(self.mant, self.exp - exp)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, o: Scaled) -> Scaled {
        Scaled::new(self.mant * o.mant, self.exp + o.exp)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, o: Scaled) -> Scaled {
        Scaled::new(self.mant / o.mant, self.exp - o.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_f64_range() {
        let big = Scaled::new(Complex64::new(1.0, 1.0), 3000);
        let small = Scaled::new(Complex64::new(2.0, 0.0), -3000);
        let p = big * small;
        assert_eq!(p.value(), Complex64::new(2.0, 2.0));
        let s = big.add(small);
        assert_eq!(s, big);
        assert_eq!((big / big).value(), Complex64::new(1.0, 0.0));
        assert!((big.ln_abs() - (3000.0 * 2f64.ln() + 2f64.sqrt().ln())).abs() < 1e-12);
    }

    #[test]
    fn exp_real_matches_std() {
        for x in [-3.0, 0.5, 699.0] {
            assert_eq!(Scaled::exp_real(x).value().re, x.exp());
        }
        let e = Scaled::exp_real(2000.0);
        assert!((e.ln_abs() - 2000.0).abs() < 1e-12);
    }

    #[test]
    fn zero_is_absorbing() {
        let z = Scaled::ZERO;
        let a = Scaled::from_complex(Complex64::new(3.0, -1.0));
        assert_eq!(z.add(a).value(), a.value());
        assert!((z * a).is_zero());
        assert_eq!(z.ln_abs(), f64::NEG_INFINITY);
    }
}
