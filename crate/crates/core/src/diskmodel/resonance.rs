//! Zeros of ℓ ↦ det M_m(η, ℓR): resonances (Im ℓ ≤ 0) from contour
//! integration and eigenvalues (ℓ = it) from a sign-change scan.
//!
//! On the positive imaginary axis
//! det M_m(η, itR) = (2/π) K_m(tR) [η⁻¹ J_m'(ηtR) + J_m(ηtR) K_m'(tR)/K_m(tR)],
//! a positive multiple of a real function of t, so eigenvalues are found by
//! bisection rather than by boxes that would straddle the cut.

use super::{det_m_scaled, det_real_parts, det_relative, DiskConfig, DiskError, Result};
use crate::rootfind::{self, Analytic, Evaluation, SearchRegion, UnresolvedBox};
use crate::specfun::{self, Scaled};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceClass {
    Inner,
    Outer,
    Plasmonic,
    Unknown,
}

impl std::fmt::Display for ResonanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ResonanceClass::Inner => "inner",
            ResonanceClass::Outer => "outer",
            ResonanceClass::Plasmonic => "plasmonic",
            ResonanceClass::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub order: i32,
    pub ell: Complex64,
    pub ell_squared: Complex64,
    /// Root multiplicity, doubled for m ≠ 0 (the ±m pair).
    pub multiplicity: u32,
    /// |det| relative to the magnitude of its two terms.
    pub residual: f64,
    /// Found by the imaginary-axis scan (ℓ² real negative).
    pub on_imaginary_axis: bool,
    pub class: ResonanceClass,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub records: Vec<ResonanceRecord>,
    pub unresolved: Vec<UnresolvedBox>,
    /// ℓ-rectangles handed to the contour search.
    pub search_boxes: Vec<SearchRegion>,
}

/// Quasi-resonance ℓ̆(m) = Σ ℓ̆_n (L/2πm)^{n−1} and its interval half-width
/// |ℓ̆₂| L/(2πm). With `imaginary` set the expansion is of |ℓ| on the
/// positive imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlasmonPrediction {
    pub coeffs: [f64; 3],
    pub length: f64,
    pub imaginary: bool,
}

impl PlasmonPrediction {
    fn h(&self, m: i32) -> f64 {
        self.length / (2.0 * PI * m as f64)
    }

    pub fn magnitude(&self, m: i32) -> f64 {
        let h = self.h(m);
        self.coeffs[0] / h + self.coeffs[1] + self.coeffs[2] * h
    }

    pub fn center(&self, m: i32) -> Complex64 {
        let v = self.magnitude(m);
        if self.imaginary {
            Complex64::new(0.0, v)
        } else {
            Complex64::new(v, 0.0)
        }
    }

    pub fn half_width(&self, m: i32) -> f64 {
        self.coeffs[2].abs() * self.h(m)
    }
}

/// Real function of t whose zeros are the eigenvalues ℓ = it of mode m,
/// returned scaled together with |g| relative to its terms.
pub fn eigenvalue_function(m: i32, eta: f64, radius: f64, t: f64) -> Result<(Scaled, f64)> {
    let jp = specfun::bessel_j_scaled(m, Complex64::new(eta * t * radius, 0.0))?;
    let kp = specfun::bessel_k_scaled(m, Complex64::new(t * radius, 0.0))?;
    let ratio = (kp.derivative / kp.value).re;
    let a = jp.derivative.re / eta;
    let b = jp.value.re * ratio;
    let g = a + b;
    let rel = g.abs() / (a.abs() + b.abs());
    Ok((Scaled::new(Complex64::new(g, 0.0), jp.exponent), rel))
}

fn g_sign(m: i32, eta: f64, radius: f64, t: f64) -> Result<f64> {
    let v = eigenvalue_function(m, eta, radius, t)?.0.mant.re;
    Ok(if v == 0.0 { 0.0 } else { v.signum() })
}

/// Eigenvalue parameters t ∈ [t_lo, t_hi] (ℓ = it) by sign changes on a
/// grid fine enough to separate the oscillations of J_m(ηtR), then bisection.
pub fn eigenvalue_scan(m: i32, config: &DiskConfig, t_lo: f64, t_hi: f64) -> Result<Vec<f64>> {
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(DiskError::InvalidConfig(format!(
            "eigenvalue scan needs 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let (eta, r) = (config.eta, config.radius);
    let n = ((16.0 * (t_hi - t_lo) * r * eta.max(1.0)).ceil() as usize).max(200);
    let ts: Vec<f64> = (0..=n)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / n as f64)
        .collect();
    let signs = ts
        .iter()
        .map(|&t| g_sign(m, eta, r, t))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..n {
        if signs[i] == 0.0 {
            out.push(ts[i]);
            continue;
        }
        if signs[i] * signs[i + 1] >= 0.0 {
            continue;
        }
        let (mut a, mut b) = (ts[i], ts[i + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let s = g_sign(m, eta, r, mid)?;
            if s == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if s == signs[i] {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Below |Im ℓ| ≈ 1e-7|ℓ| the imaginary part is lost in rounding of the
/// complex determinant. Re ℓ is then taken as the zero k₀ of D_Y and the
/// offset from one Newton step at k₀, δ = −D_J/(D_J' + iD_Y'), where D_J is
/// computed directly rather than by cancellation.
pub fn refine_near_real(m: i32, eta: f64, radius: f64, ell: Complex64) -> Result<Complex64> {
    let z_start = ell.re * radius;
    let mut z = z_start;
    for _ in 0..50 {
        let p = det_real_parts(m, eta, z)?;
        let step = (p.dy / p.dy_prime).value().re;
        z -= step;
        if !z.is_finite() || (z - z_start).abs() > 1e-6 * z_start.abs() {
            return Ok(ell);
        }
        if step.abs() <= 2.0 * f64::EPSILON * z.abs() {
            break;
        }
    }
    let p = det_real_parts(m, eta, z)?;
    let den = p.dj_prime.add(p.dy_prime.scale(Complex64::new(0.0, 1.0)));
    let delta = -(p.dj / den).value();
    Ok((Complex64::new(z, 0.0) + delta) / radius)
}

fn record(m: i32, ell: Complex64, mult: u32, residual: f64, axis: bool) -> ResonanceRecord {
    ResonanceRecord {
        order: m,
        ell,
        ell_squared: ell * ell,
        multiplicity: if m == 0 { mult } else { 2 * mult },
        residual,
        on_imaginary_axis: axis,
        class: ResonanceClass::Unknown,
    }
}

fn scan_records(m: i32, config: &DiskConfig, t_lo: f64, t_hi: f64) -> Result<Vec<ResonanceRecord>> {
    eigenvalue_scan(m, config, t_lo, t_hi)?
        .into_iter()
        .map(|t| {
            let rel = eigenvalue_function(m, config.eta, config.radius, t)?.1;
            Ok(record(m, Complex64::new(0.0, t), 1, rel, true))
        })
        .collect()
}

fn contour_records(
    m: i32,
    config: &DiskConfig,
    region: &SearchRegion,
    out: &mut ResonanceSet,
) -> Result<()> {
    let (eta, r) = (config.eta, config.radius);
    let f = Analytic(move |l: Complex64| {
        let p = det_m_scaled(m, eta, l * r).map_err(|e| e.to_string())?;
        Ok(Evaluation {
            value: p.value,
            derivative: p.derivative * r,
            exponent: p.exponent,
        })
    });
    let found = rootfind::find_roots(&f, region, 1e-14)?;
    out.search_boxes.push(found.region.unwrap_or(*region));
    out.unresolved.extend(found.unresolved);
    for root in found.roots {
        let mut ell = root.location;
        if ell.im.abs() < 1e-7 * ell.norm() && ell.re > 0.0 {
            ell = refine_near_real(m, eta, r, ell)?;
        }
        let rel = det_relative(m, eta, ell * r)?;
        out.records.push(record(m, ell, root.multiplicity, rel, false));
    }
    Ok(())
}

/// Zeros of ℓ ↦ det M_m(η, ℓR) in an ℓ-rectangle, for m ≥ 0. The part of
/// the positive imaginary axis inside the rectangle is scanned in 1-D; the
/// contour search covers the part with Re ℓ > 10⁻³·diag.
pub fn resonances_disk(m: i32, config: &DiskConfig, region: &SearchRegion) -> Result<ResonanceSet> {
    config.validate()?;
    region.validate()?;
    let mut out = ResonanceSet::default();
    if region.re_min <= 0.0 && region.re_max >= 0.0 && region.im_max > 0.0 {
        let lo = region.im_min.max(1e-3);
        if region.im_max > lo {
            out.records.extend(scan_records(m, config, lo, region.im_max)?);
        }
    }
    let shift = 1e-3 * region.diagonal();
    let re_min = region.re_min.max(shift);
    if re_min < region.re_max {
        let sub = SearchRegion::new(re_min, region.re_max, region.im_min, region.im_max)?;
        contour_records(m, config, &sub, &mut out)?;
    }
    Ok(out)
}

/// Default ℓ² window [−4(m/R)², 4(m/R)²] × [−50, 1] (with m replaced by 1
/// for m = 0).
pub fn default_region_ell_squared(m: i32, radius: f64) -> SearchRegion {
    let s = (m.max(1) as f64 / radius).powi(2);
    SearchRegion {
        re_min: -4.0 * s,
        re_max: 4.0 * s,
        im_min: -50.0,
        im_max: 1.0,
    }
}

/// Zeros with ℓ² in the given ℓ²-rectangle. Negative real ℓ² come from the
/// imaginary-axis scan; the rest from ℓ-boxes [a, 4a] × [−d(a), 0.05],
/// starting at a = 10⁻³ℓ_max, with d(a) the depth of the rectangle's
/// preimage over Re ℓ ≥ a. Roots are filtered back to the rectangle; the
/// boxes are recorded in `search_boxes`.
pub fn resonances_ell_squared(
    m: i32,
    config: &DiskConfig,
    region: &SearchRegion,
) -> Result<ResonanceSet> {
    config.validate()?;
    region.validate()?;
    let mut out = ResonanceSet::default();
    if region.re_min < 0.0 && region.im_min <= 0.0 && region.im_max >= 0.0 {
        let hi = (-region.re_min).sqrt();
        let lo = (-region.re_max).max(0.0).sqrt().max(1e-3);
        if hi > lo {
            out.records.extend(scan_records(m, config, lo, hi)?);
        }
    }
    if region.re_max > 0.0 {
        let im = region.im_min.abs().max(region.im_max.abs());
        let hi = (0.5 * (region.re_max.hypot(im) + region.re_max)).sqrt();
        // deepest Im ℓ over the rectangle, reached at its lower-left corner;
        // on Re ℓ ≥ a the strip Im ℓ² ≥ im_min needs only Im ℓ ≥ im_min/2a
        let depth = if region.im_min < 0.0 {
            (0.5 * (region.re_min.hypot(region.im_min) - region.re_min)).sqrt()
        } else {
            0.0
        };
        let mut part = ResonanceSet::default();
        let mut a = 1e-3 * hi;
        while a < hi {
            let b = if 4.0 * a > 0.5 * hi { hi } else { 4.0 * a };
            let floor = depth.min(-region.im_min.min(0.0) / (2.0 * a)).max(0.05);
            contour_records(m, config, &SearchRegion::new(a, b, -floor, 0.05)?, &mut part)?;
            a = b;
        }
        // a root on a shared edge can be found from both sides
        let mut kept: Vec<ResonanceRecord> = Vec::new();
        for r in part.records {
            if !kept.iter().any(|k| (k.ell - r.ell).norm() <= 1e-9 * r.ell.norm()) {
                kept.push(r);
            }
        }
        part.records = kept;
        out.records.extend(part.records.into_iter().filter(|r| region.contains(r.ell_squared)));
        out.unresolved.extend(part.unresolved);
        out.search_boxes.extend(part.search_boxes);
    }
    Ok(out)
}

/// Label each record. Plasmonic: within three interval half-widths of the
/// prediction ℓ̆(m); inner: remaining roots on the imaginary ℓ-axis;
/// outer: remaining roots with Im ℓ² < 0; anything else is `unknown`.
pub fn classify(
    records: Vec<ResonanceRecord>,
    prediction: Option<&PlasmonPrediction>,
) -> Vec<ResonanceRecord> {
    records
        .into_iter()
        .map(|mut r| {
            let near = prediction.is_some_and(|p| {
                r.order != 0
                    && (r.ell - p.center(r.order.abs())).norm() <= 3.0 * p.half_width(r.order.abs())
            });
            r.class = if near {
                ResonanceClass::Plasmonic
            } else if r.on_imaginary_axis {
                ResonanceClass::Inner
            } else if r.ell_squared.im < 0.0 {
                ResonanceClass::Outer
            } else {
                ResonanceClass::Unknown
            };
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diskmodel::det_m;

    #[test]
    fn imaginary_axis_determinant_is_real_multiple() {
        let eta = 0.9f64.sqrt();
        for &t in &[0.7, 3.1, 4.2] {
            let d = det_m(6, eta, Complex64::new(0.0, t)).unwrap();
            let (g, _) = eigenvalue_function(6, eta, 1.0, t).unwrap();
            let k = specfun::bessel_k(6, Complex64::new(t, 0.0)).unwrap().value.re;
            let expect = g.value().re * k * 2.0 / PI;
            assert!((d - expect).norm() < 1e-12 * d.norm(), "{d} {expect}");
        }
    }

    #[test]
    fn m6_eigenvalue_for_eps_minus_point_nine() {
        let cfg = DiskConfig::from_permittivity(1.0, -0.9, 2.0, 32).unwrap();
        let ts = eigenvalue_scan(6, &cfg, 1e-3, 12.0).unwrap();
        assert!(ts.iter().any(|t| (t - 1.990_946_190_07).abs() < 1e-9), "{ts:?}");
    }

    #[test]
    fn k12_resonance() {
        let cfg = DiskConfig::from_permittivity(1.0, -1.1, 2.0, 32).unwrap();
        let region = SearchRegion::new(3.0, 4.0, -0.5, 0.05).unwrap();
        let set = resonances_disk(12, &cfg, &region).unwrap();
        let r = set
            .records
            .iter()
            .find(|r| (r.ell.re - 3.590_517_338_449_228_4).abs() < 1e-9)
            .expect("k12 root");
        assert!(r.ell.im < 0.0 && r.ell.im > -1e-2);
        assert!((r.ell.im + 4.45e-9).abs() < 0.02e-9, "{}", r.ell.im);
        assert_eq!(r.multiplicity, 2);
    }

    #[test]
    fn m6_resonance_below_the_axis_for_eps_minus_one_point_one() {
        let cfg = DiskConfig::from_permittivity(1.0, -1.1, 2.0, 32).unwrap();
        let region = SearchRegion::new(1.0, 3.0, -0.5, 0.05).unwrap();
        let set = resonances_disk(6, &cfg, &region).unwrap();
        assert!(set.records.iter().any(|r| r.ell.im < 0.0));
    }

    #[test]
    fn classification_rules() {
        let p = PlasmonPrediction {
            coeffs: [0.3, 0.0, -0.1],
            length: 2.0 * PI,
            imaginary: false,
        };
        let near = record(10, Complex64::new(3.0, -1e-9), 1, 0.0, false);
        let axis = record(10, Complex64::new(0.0, 5.0), 1, 0.0, true);
        let far = record(10, Complex64::new(1.0, -0.5), 1, 0.0, false);
        let up = record(10, Complex64::new(1.0, 0.5), 1, 0.0, false);
        let out = classify(vec![near, axis, far, up], Some(&p));
        let cls: Vec<_> = out.iter().map(|r| r.class).collect();
        assert_eq!(
            cls,
            vec![
                ResonanceClass::Plasmonic,
                ResonanceClass::Inner,
                ResonanceClass::Outer,
                ResonanceClass::Unknown
            ]
        );
        assert_eq!(classify(vec![near], None)[0].class, ResonanceClass::Outer);
    }
}
