//! k-sweeps of the stability ratio with peak detection.
//!
//! Plasmonic peaks are narrower than any practical base grid (their width
//! is |Im ℓ_m|, tiny for m ≳ 10). Each mode's real-axis determinant
//! D_J + iD_Y has |det| smallest where D_Y vanishes, so the sweep adds the
//! zeros of D_Y in the scanned window, plus close neighbours, to the grid.

use super::{det_real_parts, stability_ratio_of, DiskConfig, Result, ScatterSolution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// A flagged peak must exceed the sweep median by this factor.
    pub peak_factor: f64,
    /// Insert the D_Y zeros of every mode into the grid.
    pub refine_peaks: bool,
    /// Offset of the neighbours placed around each inserted zero.
    pub neighbour: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            peak_factor: 5.0,
            refine_peaks: true,
            neighbour: 1e-5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub k: f64,
    pub n: f64,
    /// Exceeds both neighbours and `peak_factor` × the sweep median.
    pub is_local_max: bool,
    /// Mode whose D_Y zero produced this sample, if any.
    pub mode: Option<i32>,
}

/// Sign of D_Y for mode m at k (0 when it vanishes exactly).
fn dy_sign(m: i32, cfg: &DiskConfig, k: f64) -> Result<f64> {
    let p = det_real_parts(m, cfg.eta, k * cfg.radius)?;
    let v = p.dy.mant.re;
    Ok(if v == 0.0 { 0.0 } else { v.signum() })
}

/// Safeguarded Newton on D_Y inside a sign-change bracket.
fn dy_root(m: i32, cfg: &DiskConfig, mut a: f64, mut b: f64, sa: f64) -> Result<f64> {
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let p = det_real_parts(m, cfg.eta, x * cfg.radius)?;
        let f = p.dy.mant.re;
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        let step = (p.dy / p.dy_prime).value().re / cfg.radius;
        let mut next = x - step;
        if !(next > a.min(b) && next < a.max(b)) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() || (b - a).abs() <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Zeros of D_Y for mode m bracketed by consecutive grid points.
pub fn dy_zeros(m: i32, config: &DiskConfig, grid: &[f64]) -> Result<Vec<f64>> {
    let signs = grid
        .iter()
        .map(|&k| dy_sign(m, config, k))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for w in 0..grid.len().saturating_sub(1) {
        if signs[w] == 0.0 {
            out.push(grid[w]);
        } else if signs[w] * signs[w + 1] < 0.0 {
            out.push(dy_root(m, config, grid[w], grid[w + 1], signs[w])?);
        }
    }
    Ok(out)
}

/// center, center ± w·ratio^j for j ≥ 0 while w·ratio^j ≥ min_spacing.
pub fn geometric_refinement(center: f64, half_width: f64, ratio: f64, min_spacing: f64) -> Vec<f64> {
    let mut v = vec![center];
    let mut d = half_width;
    while d >= min_spacing && d > 0.0 {
        v.push(center - d);
        v.push(center + d);
        d *= ratio;
    }
    v
}

fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    if s.is_empty() {
        return f64::NAN;
    }
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// N_{ε,ρ}(k) on `ks` (plus inserted peak points) with flagged maxima.
/// The output is sorted by k and independent of thread scheduling.
pub fn sweep(config: &DiskConfig, ks: &[f64], opts: &SweepOptions) -> Result<Vec<SweepSample>> {
    config.validate()?;
    let mut base: Vec<f64> = ks.to_vec();
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pts: Vec<(f64, Option<i32>)> = base.iter().map(|&k| (k, None)).collect();
    if opts.refine_peaks && base.len() > 1 {
        let (lo, hi) = (base[0], base[base.len() - 1]);
        let zeros = (0..=config.truncation as i32)
            .into_par_iter()
            .map(|m| Ok((m, dy_zeros(m, config, &base)?)))
            .collect::<Result<Vec<_>>>()?;
        for (m, zs) in zeros {
            for k0 in zs {
                pts.push((k0, Some(m)));
                for k in [k0 - opts.neighbour, k0 + opts.neighbour] {
                    if k > lo && k < hi {
                        pts.push((k, None));
                    }
                }
            }
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.is_some().cmp(&a.1.is_some())));
    pts.dedup_by(|b, a| (b.0 - a.0).abs() <= 1e-14 * a.0.abs());
    let ns = pts
        .par_iter()
        .map(|&(k, _)| stability_ratio_of(&ScatterSolution::new(config, k, FRAC_PI_2)?))
        .collect::<Result<Vec<_>>>()?;
    let med = median(&ns);
    let n = ns.len();
    Ok((0..n)
        .map(|i| {
            let local = i > 0 && i + 1 < n && ns[i] > ns[i - 1] && ns[i] > ns[i + 1];
            SweepSample {
                k: pts[i].0,
                n: ns[i],
                is_local_max: local && ns[i] > opts.peak_factor * med,
                mode: pts[i].1,
            }
        })
        .collect())
}
