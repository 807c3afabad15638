//! Zeros of holomorphic functions in rectangles by the argument principle.
//!
//! The winding integral (1/2πi)∮ f'/f and the moments ∮ (z−c)^k f'/f are
//! computed with adaptive Gauss–Kronrod on the four edges. Boxes holding
//! more than two zeros are quadrisected; smaller ones are resolved from the
//! Delves–Lyness moment equations and polished by (modified) Newton steps.
//! Only the ratio f'/f enters, so evaluators may return values with a shared
//! binary exponent (see [`Evaluation`]).

use crate::quadrature::adaptive_gk15;
use crate::specfun::{Scaled, ScaledPair};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootFindError {
    #[error("invalid search region: {0}")]
    InvalidRegion(String),
    #[error("zero of f on or too close to the contour near {0}")]
    BoundaryZero(Complex64),
    #[error("winding number {0} is not within 0.25 of an integer")]
    NonInteger(f64),
    #[error("function evaluation failed at {at}: {msg}")]
    Evaluation { at: Complex64, msg: String },
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, RootFindError> {
        let r = SearchRegion {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), RootFindError> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max;
        if ok {
            Ok(())
        } else {
            Err(RootFindError::InvalidRegion(format!("{self:?}")))
        }
    }

    pub fn diagonal(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Whether the region crosses the closed negative real axis.
    pub fn touches_negative_real_axis(&self) -> bool {
        self.re_min <= 0.0 && self.im_min <= 0.0 && self.im_max >= 0.0
    }

    fn inflate(&self, d: f64) -> SearchRegion {
        SearchRegion {
            re_min: self.re_min - d,
            re_max: self.re_max + d,
            im_min: self.im_min - d,
            im_max: self.im_max + d,
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, at: Complex64) -> [SearchRegion; 4] {
        [
            SearchRegion::new_unchecked(self.re_min, at.re, self.im_min, at.im),
            SearchRegion::new_unchecked(at.re, self.re_max, self.im_min, at.im),
            SearchRegion::new_unchecked(self.re_min, at.re, at.im, self.im_max),
            SearchRegion::new_unchecked(at.re, self.re_max, at.im, self.im_max),
        ]
    }

    fn new_unchecked(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        SearchRegion {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }
}

/// f and f' at a point, both multiplied by 2^{−exponent}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub derivative: Complex64,
    pub exponent: i64,
}

impl Evaluation {
    pub fn plain(value: Complex64, derivative: Complex64) -> Self {
        Evaluation {
            value,
            derivative,
            exponent: 0,
        }
    }

    /// f'/f.
    pub fn log_derivative(&self) -> Complex64 {
        self.derivative / self.value
    }

    /// |f| in natural scale (may overflow to inf or flush to 0).
    pub fn abs_value(&self) -> f64 {
        Scaled::new(self.value, self.exponent).value().norm()
    }

    /// ln|f|.
    pub fn ln_abs(&self) -> f64 {
        Scaled::new(self.value, self.exponent).ln_abs()
    }
}

impl From<ScaledPair> for Evaluation {
    fn from(p: ScaledPair) -> Self {
        Evaluation {
            value: p.value,
            derivative: p.derivative,
            exponent: p.exponent,
        }
    }
}

/// A function holomorphic on the search region, evaluated with its derivative.
pub trait Holomorphic: Sync {
    fn eval(&self, z: Complex64) -> Result<Evaluation, String>;
}

/// Closure returning (f, f') directly.
pub struct Analytic<F>(pub F);

impl<F> Holomorphic for Analytic<F>
where
    F: Fn(Complex64) -> Result<Evaluation, String> + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Evaluation, String> {
        (self.0)(z)
    }
}

/// Closure returning f only; f' from a five-point central difference.
///
/// Complex-step differentiation does not apply to functions that are
/// already complex-valued, so the fallback is a finite difference along the
/// real direction (exact for holomorphic f up to O(h⁴)).
pub struct Numeric<F> {
    pub f: F,
    pub step: f64,
}

impl<F> Numeric<F>
where
    F: Fn(Complex64) -> Result<Complex64, String> + Sync,
{
    pub fn new(f: F) -> Self {
        Numeric { f, step: 1e-3 }
    }
}

impl<F> Holomorphic for Numeric<F>
where
    F: Fn(Complex64) -> Result<Complex64, String> + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Evaluation, String> {
        let h = self.step * z.norm().max(1.0);
        let f0 = (self.f)(z)?;
        let fp1 = (self.f)(z + h)?;
        let fm1 = (self.f)(z - h)?;
        let fp2 = (self.f)(z + 2.0 * h)?;
        let fm2 = (self.f)(z - 2.0 * h)?;
        let d = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
        Ok(Evaluation::plain(f0, d))
    }
}

/// A zero with its multiplicity and |f| there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub location: Complex64,
    pub multiplicity: u32,
    pub residual: f64,
}

/// A box the search could not resolve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedBox {
    pub region: SearchRegion,
    pub count: u32,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootSearch {
    pub roots: Vec<RootRecord>,
    pub unresolved: Vec<UnresolvedBox>,
    /// Region actually integrated (after any boundary perturbation).
    pub region: Option<SearchRegion>,
    pub total_count: u32,
}

/// Tuning parameters; the defaults suit the determinants in this crate.
#[derive(Clone, Copy, Debug)]
pub struct RootFindOptions {
    /// Absolute error target for the winding integral.
    pub quadrature_tol: f64,
    /// A sample with |f/f'| below this fraction of the box diagonal counts as
    /// a zero on the contour.
    pub boundary_floor: f64,
    pub max_panels: usize,
    pub max_depth: u32,
    pub newton_iterations: usize,
    /// Relative Newton step accepted as converged.
    pub newton_tol: f64,
}

impl Default for RootFindOptions {
    fn default() -> Self {
        RootFindOptions {
            quadrature_tol: 1e-6,
            boundary_floor: 1e-7,
            max_panels: 4000,
            max_depth: 40,
            newton_iterations: 60,
            newton_tol: 1e-14,
        }
    }
}

/// Zero count and the power sums Σ(z_k − c), Σ(z_k − c)² about the box centre.
#[derive(Clone, Copy, Debug)]
struct Moments {
    count: u32,
    s1: Complex64,
    s2: Complex64,
}

fn edge_moments<H: Holomorphic + ?Sized>(
    f: &H,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    scale: f64,
    floor: f64,
    opts: &RootFindOptions,
    tol: f64,
) -> Result<[Complex64; 3], RootFindError> {
    let dz = b - a;
    let integrand = |t: f64| -> Result<Vec<Complex64>, RootFindError> {
        let z = a + dz * t;
        let e = f.eval(z).map_err(|msg| RootFindError::Evaluation { at: z, msg })?;
        if e.value.norm() == 0.0 || (e.value / e.derivative).norm() < floor {
            return Err(RootFindError::BoundaryZero(z));
        }
        let g = e.log_derivative() * dz;
        if !g.is_finite() {
            return Err(RootFindError::Evaluation {
                at: z,
                msg: "non-finite logarithmic derivative".into(),
            });
        }
        let w = (z - c) / scale;
        Ok(vec![g, g * w, g * w * w])
    };
    let r = adaptive_gk15(integrand, 0.0, 1.0, tol * 2.0 * PI, &[], opts.max_panels)?;
    Ok([r.value[0], r.value[1], r.value[2]])
}

fn box_moments_at<H: Holomorphic + ?Sized>(
    f: &H,
    region: &SearchRegion,
    opts: &RootFindOptions,
    tol: f64,
) -> Result<(f64, Complex64, Complex64), RootFindError> {
    let c = region.center();
    let scale = 0.5 * region.diagonal();
    let floor = opts.boundary_floor * region.diagonal();
    let k = region.corners();
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for i in 0..4 {
        let e = edge_moments(f, k[i], k[(i + 1) % 4], c, scale, floor, opts, tol / 4.0)?;
        for j in 0..3 {
            acc[j] += e[j];
        }
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let m0 = acc[0] / two_pi_i;
    let s1 = acc[1] / two_pi_i * scale;
    let s2 = acc[2] / two_pi_i * scale * scale;
    Ok((m0.re, s1, s2))
}

fn box_moments<H: Holomorphic + ?Sized>(
    f: &H,
    region: &SearchRegion,
    opts: &RootFindOptions,
) -> Result<Moments, RootFindError> {
    let mut tol = opts.quadrature_tol;
    let mut last = f64::NAN;
    for _ in 0..3 {
        let (m0, s1, s2) = box_moments_at(f, region, opts, tol)?;
        let n = m0.round();
        if (m0 - n).abs() <= 0.25 && n >= 0.0 {
            // moments are accurate to the quadrature tolerance only; tighten
            // once more if the winding value itself is fuzzy
            if (m0 - n).abs() < 1e-3 || tol < opts.quadrature_tol * 1e-3 {
                return Ok(Moments {
                    count: n as u32,
                    s1,
                    s2,
                });
            }
        }
        last = m0;
        tol *= 1e-2;
    }
    let n = last.round();
    if (last - n).abs() <= 0.25 && n >= 0.0 {
        let (_, s1, s2) = box_moments_at(f, region, opts, tol)?;
        return Ok(Moments {
            count: n as u32,
            s1,
            s2,
        });
    }
    Err(RootFindError::NonInteger(last))
}

/// Number of zeros (with multiplicity) of `f` inside `region`.
pub fn count_zeros<H: Holomorphic + ?Sized>(
    f: &H,
    region: &SearchRegion,
    quadrature_tol: f64,
) -> Result<u32, RootFindError> {
    region.validate()?;
    let opts = RootFindOptions {
        quadrature_tol,
        ..Default::default()
    };
    Ok(box_moments(f, region, &opts)?.count)
}

/// Newton polish with multiplicity `mult`. Returns the iterate with the
/// smallest |f| seen (never worse than the starting point).
fn polish<H: Holomorphic + ?Sized>(
    f: &H,
    z0: Complex64,
    mult: u32,
    opts: &RootFindOptions,
) -> Result<(Complex64, Evaluation, bool), RootFindError> {
    let ev = |z: Complex64| f.eval(z).map_err(|msg| RootFindError::Evaluation { at: z, msg });
    let mut z = z0;
    let mut e = ev(z)?;
    let mut best = (z, e);
    let mut converged = false;
    for _ in 0..opts.newton_iterations {
        if e.value.norm() == 0.0 {
            converged = true;
            break;
        }
        let step = mult as f64 * e.value / e.derivative;
        if !step.is_finite() {
            break;
        }
        z -= step;
        e = ev(z)?;
        if e.ln_abs() <= best.1.ln_abs() {
            best = (z, e);
        }
        if step.norm() <= opts.newton_tol * z.norm().max(1e-300) {
            converged = true;
            break;
        }
    }
    Ok((best.0, best.1, converged))
}

fn roots_from_moments(m: &Moments, c: Complex64, diag: f64) -> Vec<(Complex64, u32)> {
    let local = match m.count {
        1 => vec![(m.s1, 1)],
        2 => {
            // z² − s1 z + (s1² − s2)/2 = 0
            let p = m.s1;
            let q = 0.5 * (m.s1 * m.s1 - m.s2);
            let disc = (p * p - 4.0 * q).sqrt();
            let z1 = 0.5 * (p + disc);
            let z2 = 0.5 * (p - disc);
            if (z1 - z2).norm() < 1e-4 * diag {
                vec![(0.5 * p, 2)]
            } else {
                vec![(z1, 1), (z2, 1)]
            }
        }
        n => {
            // a single cluster of multiplicity n has zero variance
            let nf = n as f64;
            let mean = m.s1 / nf;
            let var = m.s2 / nf - mean * mean;
            if var.norm().sqrt() < 1e-4 * diag {
                vec![(mean, n)]
            } else {
                vec![]
            }
        }
    };
    local.into_iter().map(|(z, k)| (z + c, k)).collect()
}

struct Search<'a, H: ?Sized> {
    f: &'a H,
    opts: RootFindOptions,
    out: RootSearch,
}

impl<'a, H: Holomorphic + ?Sized> Search<'a, H> {
    fn resolve(&mut self, region: SearchRegion, m: Moments, depth: u32) {
        if m.count == 0 {
            return;
        }
        let diag = region.diagonal();
        if let Some(roots) = self.try_extract(&region, &m) {
            self.out.roots.extend(roots);
            return;
        }
        if depth >= self.opts.max_depth {
            self.out.unresolved.push(UnresolvedBox {
                region,
                count: m.count,
                reason: "maximum subdivision depth reached".into(),
            });
            return;
        }
        // quadrisect, nudging the split point off any zero on the new edges
        let mut attempt = 0;
        loop {
            let shift = 0.013_7 * attempt as f64 * diag;
            let at = region.center() + Complex64::new(shift, 0.7 * shift);
            let children = region.split(at);
            let mut moments = Vec::with_capacity(4);
            let mut failure = None;
            for ch in &children {
                match box_moments(self.f, ch, &self.opts) {
                    Ok(mm) => moments.push(mm),
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            match failure {
                None => {
                    let total: u32 = moments.iter().map(|mm| mm.count).sum();
                    if total != m.count {
                        log::warn!(
                            "zero count not conserved in {:?}: parent {} children {}",
                            region,
                            m.count,
                            total
                        );
                    }
                    for (ch, mm) in children.into_iter().zip(moments) {
                        self.resolve(ch, mm, depth + 1);
                    }
                    return;
                }
                Some(RootFindError::BoundaryZero(_)) if attempt < 5 => attempt += 1,
                Some(e) => {
                    self.out.unresolved.push(UnresolvedBox {
                        region,
                        count: m.count,
                        reason: e.to_string(),
                    });
                    return;
                }
            }
        }
    }

    fn try_extract(&mut self, region: &SearchRegion, m: &Moments) -> Option<Vec<RootRecord>> {
        let diag = region.diagonal();
        let guess = roots_from_moments(m, region.center(), diag);
        if guess.is_empty() {
            return None;
        }
        let mut found = Vec::new();
        for (z0, mult) in guess {
            let (z, e, ok) = match polish(self.f, z0, mult, &self.opts) {
                Ok(v) => v,
                Err(_) => return None,
            };
            let slack = region.inflate(1e-6 * diag);
            if !slack.contains(z) {
                return None;
            }
            // rounding limits a multiple root to about ε^{1/mult}, so the
            // step test may fail there; confirm by counting in a small box
            if !ok {
                let r = 1e-3 * diag;
                let small = SearchRegion::new(z.re - r, z.re + r, z.im - r, z.im + r).ok()?;
                if mult == 1 || box_moments(self.f, &small, &self.opts).ok()?.count != mult {
                    return None;
                }
            }
            found.push(RootRecord {
                location: z,
                multiplicity: mult,
                residual: e.abs_value(),
            });
        }
        // two simple guesses polished onto one point: a double root
        if found.len() == 2 && (found[0].location - found[1].location).norm() <= 1e-8 * diag {
            let (z, e, ok) = polish(self.f, found[0].location, 2, &self.opts).ok()?;
            if !ok {
                return None;
            }
            found = vec![RootRecord {
                location: z,
                multiplicity: 2,
                residual: e.abs_value(),
            }];
        }
        Some(found)
    }
}

/// All zeros of `f` in `region`, Newton-polished until the relative step
/// falls below `tol`.
pub fn find_roots<H: Holomorphic + ?Sized>(
    f: &H,
    region: &SearchRegion,
    tol: f64,
) -> Result<RootSearch, RootFindError> {
    find_roots_with(
        f,
        region,
        RootFindOptions {
            newton_tol: tol,
            ..Default::default()
        },
    )
}

/// [`find_roots`] with explicit options.
pub fn find_roots_with<H: Holomorphic + ?Sized>(
    f: &H,
    region: &SearchRegion,
    opts: RootFindOptions,
) -> Result<RootSearch, RootFindError> {
    region.validate()?;
    let diag = region.diagonal();
    // original region, then alternately inflated/deflated copies
    let deltas = [0.0, 1.0, -1.0, 2.0, -2.0, 3.0];
    let mut last_err = None;
    for d in deltas {
        let r = region.inflate(d * 1e-3 * diag);
        match box_moments(f, &r, &opts) {
            Ok(m) => {
                let mut s = Search {
                    f,
                    opts,
                    out: RootSearch {
                        region: Some(r),
                        total_count: m.count,
                        ..Default::default()
                    },
                };
                s.resolve(r, m, 0);
                return Ok(s.out);
            }
            Err(e @ RootFindError::BoundaryZero(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}
