use super::output::{Cell, Document, Table};
use super::{CliError, Result, RunConfig};
use crate::diskmodel::{
    classify, default_region_ell_squared, geometric_refinement, resonances_ell_squared, sweep, DiskConfig, SweepOptions,
};
use crate::fit::loglog_slope;
use crate::geometry::{build_curve, BoundaryCurve, CurveDescriptor, PermittivityDescriptor, PermittivityProfile};
use crate::wkb::{
    plasmon_intervals, quasi_resonance_coeffs, quasimode_eval, quasimode_on_grid, winding_number, wkb_residual,
    WkbExpansion, WkbOptions,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

fn document(cfg: &RunConfig, metadata: Map<String, Value>, table: Table) -> Document {
    Document { config: serde_json::to_value(cfg).expect("serializable config"), metadata, table }
}

/// (radius, ε) for commands that need the exact disk solver.
fn disk_params(cfg: &RunConfig) -> Result<(f64, f64)> {
    match (&cfg.geometry, cfg.permittivity) {
        (CurveDescriptor::Circle { radius }, PermittivityDescriptor::Constant { value }) => Ok((*radius, value)),
        _ => Err(CliError::Config(format!(
            "{} uses the exact disk solver and needs a circle with constant permittivity; \
             use `intervals` or `quasimode` for other configurations",
            cfg.command
        ))),
    }
}

fn expansion(cfg: &RunConfig, order: usize) -> Result<WkbExpansion> {
    let curve = build_curve(&cfg.geometry, cfg.grid)?;
    let profile = PermittivityProfile::from(cfg.permittivity);
    Ok(WkbExpansion::build(&curve, &profile, &WkbOptions { order, conjugate: false })?)
}

/// WKB prediction on the disk, used for refinement and classification.
fn disk_expansion(radius: f64, eps: f64, grid: usize) -> Result<WkbExpansion> {
    let curve = build_curve(&CurveDescriptor::Circle { radius }, grid.max(64))?;
    Ok(WkbExpansion::build(&curve, &PermittivityProfile::Constant(eps), &WkbOptions::default())?)
}

pub(super) fn run_scatter_sweep(cfg: &RunConfig) -> Result<Document> {
    let (radius, eps) = disk_params(cfg)?;
    let sc = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing sweep section".into()))?;
    let disk = DiskConfig::from_permittivity(radius, eps, sc.rho, sc.truncation)?;
    let mut ks = sc.k.values();
    let mut meta = Map::new();
    if sc.refine && eps < -1.0 {
        let exp = disk_expansion(radius, eps, cfg.grid)?;
        let ms: Vec<i32> = (1..=sc.truncation.max(1) as i32).collect();
        let mut used = Vec::new();
        for iv in plasmon_intervals(&exp, &ms)? {
            if iv.center < sc.k.k_min || iv.center > sc.k.k_max {
                continue;
            }
            let half = 0.5 * (iv.b - iv.a);
            ks.extend(
                geometric_refinement(iv.center, half, sc.refine_ratio, sc.min_spacing)
                    .into_iter()
                    .filter(|k| *k > sc.k.k_min && *k < sc.k.k_max),
            );
            used.push(json!({"m": iv.m, "a": iv.a, "center": iv.center, "b": iv.b}));
        }
        meta.insert("intervals".into(), Value::Array(used));
    }
    let opts = SweepOptions { peak_factor: sc.peak_factor, refine_peaks: sc.refine, neighbour: sc.min_spacing };
    let samples = sweep(&disk, &ks, &opts)?;
    if let Some(bad) = samples.iter().find(|s| !s.n.is_finite()) {
        return Err(CliError::Numerical(format!("stability ratio is not finite at k = {}", bad.k)));
    }
    let mut ns: Vec<f64> = samples.iter().map(|s| s.n).collect();
    ns.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if ns.len() % 2 == 1 { ns[ns.len() / 2] } else { 0.5 * (ns[ns.len() / 2 - 1] + ns[ns.len() / 2]) };
    let peaks: Vec<f64> = samples.iter().filter(|s| s.is_local_max).map(|s| s.k).collect();
    meta.insert("samples".into(), json!(samples.len()));
    meta.insert("median".into(), json!(median));
    meta.insert("peaks".into(), json!(peaks));
    let mut t = Table::new(&["k", "N", "is_local_max"]);
    for s in &samples {
        t.push(vec![Cell::F(s.k), Cell::F(s.n), Cell::B(s.is_local_max)]);
    }
    Ok(document(cfg, meta, t))
}

pub(super) fn run_resonance_map(cfg: &RunConfig) -> Result<Document> {
    let (radius, eps) = disk_params(cfg)?;
    let (m_min, m_max) = cfg.modes.ok_or_else(|| CliError::Config("missing mode range".into()))?;
    let disk = DiskConfig::from_permittivity(radius, eps, 2.0 * radius, 0)?;
    let prediction = quasi_resonance_coeffs(&disk_expansion(radius, eps, cfg.grid)?).prediction();
    let results: Vec<_> = (m_min..=m_max)
        .into_par_iter()
        .map(|m| (m, resonances_ell_squared(m, &disk, &default_region_ell_squared(m, radius))))
        .collect();
    let mut t = Table::new(&["m", "re_ell2", "im_ell2", "re_ell", "im_ell", "class", "multiplicity", "residual"]);
    let (mut failures, mut unresolved) = (Vec::new(), Vec::new());
    for (m, r) in results.iter() {
        match r {
            Ok(set) => {
                for rec in classify(set.records.clone(), Some(&prediction)) {
                    t.push(vec![
                        Cell::I(*m as i64),
                        Cell::F(rec.ell_squared.re),
                        Cell::F(rec.ell_squared.im),
                        Cell::F(rec.ell.re),
                        Cell::F(rec.ell.im),
                        Cell::S(rec.class.to_string()),
                        Cell::I(rec.multiplicity as i64),
                        Cell::F(rec.residual),
                    ]);
                }
                for b in &set.unresolved {
                    unresolved.push(json!({"m": m, "region": b.region, "count": b.count, "reason": b.reason}));
                }
            }
            Err(e) => failures.push(json!({"m": m, "error": e.to_string()})),
        }
    }
    if failures.len() == results.len() {
        return Err(CliError::Numerical(format!("resonance search failed for every mode: {}", failures[0]["error"])));
    }
    let mut meta = Map::new();
    meta.insert("prediction".into(), serde_json::to_value(prediction).expect("serializable"));
    meta.insert("failures".into(), Value::Array(failures));
    meta.insert("unresolved".into(), Value::Array(unresolved));
    Ok(document(cfg, meta, t))
}

fn expansion_metadata(exp: &WkbExpansion) -> Map<String, Value> {
    let q = quasi_resonance_coeffs(exp);
    let mut meta = Map::new();
    meta.insert("lambda".into(), json!(exp.lambda));
    meta.insert("lambda_imag".into(), json!(exp.lambda_imag));
    meta.insert("ell".into(), json!(q.ell));
    meta.insert("imaginary".into(), json!(q.imaginary));
    meta.insert("length".into(), json!(exp.curve.length));
    meta.insert("grid".into(), json!(exp.curve.len()));
    meta.insert("delta".into(), json!(exp.curve.delta));
    meta.insert("orientation_reversed".into(), json!(exp.curve.reversed));
    meta
}

pub(super) fn run_intervals(cfg: &RunConfig) -> Result<Document> {
    let (m_min, m_max) = cfg.modes.ok_or_else(|| CliError::Config("missing mode range".into()))?;
    let exp = expansion(cfg, cfg.order.unwrap_or(2))?;
    let ms: Vec<i32> = (m_min..=m_max).collect();
    let mut t = Table::new(&["m", "a", "center", "b"]);
    for iv in plasmon_intervals(&exp, &ms)? {
        t.push(vec![Cell::I(iv.m as i64), Cell::F(iv.a), Cell::F(iv.center), Cell::F(iv.b)]);
    }
    Ok(document(cfg, expansion_metadata(&exp), t))
}

/// Largest relative deviation, over the nodes and both sides, of the fitted
/// normal decay rate of |u̲_m| on σ ∈ [0.5, 2] from ĥη₀^{∓1}/h.
fn decay_rate_error(exp: &WkbExpansion, m: i32, order: usize) -> Result<f64> {
    let h = exp.h(m);
    let sig: Vec<f64> = (0..7).map(|k| 0.5 + 0.25 * k as f64).collect();
    let eta0 = exp.trace.eta0();
    let mut worst = 0.0f64;
    for sgn in [-1.0, 1.0] {
        let xis: Vec<f64> = sig.iter().map(|s| sgn * s * h).filter(|x| x.abs() < 0.5 * exp.curve.delta).collect();
        if xis.len() < 2 {
            continue;
        }
        let u = quasimode_on_grid(exp, m, order, &xis)?;
        for j in 0..exp.curve.len() {
            let lx: Vec<f64> = xis.iter().map(|x| x.abs()).collect();
            let ly: Vec<f64> = u.iter().map(|row| row[j].norm().ln()).collect();
            let rate = -crate::fit::linear_slope(&lx, &ly);
            let want = if sgn < 0.0 { exp.hhat[j] * eta0[j] } else { exp.hhat[j] / eta0[j] } / h;
            worst = worst.max((rate / want - 1.0).abs());
        }
    }
    Ok(worst)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub(super) fn run_quasimode(cfg: &RunConfig) -> Result<Document> {
    let q = cfg.quasimode.as_ref().ok_or_else(|| CliError::Config("missing quasimode section".into()))?;
    let order = cfg.order.unwrap_or(2);
    let exp = expansion(cfg, order)?;
    let c: &BoundaryCurve = &exp.curve;
    let xi_max = q.xi_fraction * c.delta;
    let mut points = Vec::with_capacity(q.ns * q.nxi);
    for i in 0..q.ns {
        let s = c.length * i as f64 / q.ns as f64;
        for k in 0..q.nxi {
            points.push((s, -xi_max + 2.0 * xi_max * k as f64 / (q.nxi - 1) as f64));
        }
    }
    let values = quasimode_eval(&exp, q.m, order, &points)?;
    let mut t = Table::new(&["s", "xi", "abs", "phase"]);
    for (&(s, xi), v) in points.iter().zip(&values) {
        t.push(vec![Cell::F(s), Cell::F(xi), Cell::F(v.norm()), Cell::F(v.arg())]);
    }

    let mut meta = expansion_metadata(&exp);
    let residuals = q.residual_m.iter().map(|&m| wkb_residual(&exp, m, order)).collect::<std::result::Result<Vec<_>, _>>()?;
    if residuals.len() >= 2 {
        let ms: Vec<f64> = residuals.iter().map(|r| r.m as f64).collect();
        let slope = |f: &dyn Fn(&crate::wkb::Residual) -> f64| loglog_slope(&ms, &residuals.iter().map(f).collect::<Vec<_>>());
        meta.insert(
            "residual_slopes".into(),
            json!({
                "pde": finite_or_null(slope(&|r| r.pde)),
                "jump0": finite_or_null(slope(&|r| r.jump0)),
                "jump1": finite_or_null(slope(&|r| r.jump1)),
            }),
        );
    }
    meta.insert("residuals".into(), serde_json::to_value(&residuals).expect("serializable"));
    meta.insert("winding_number".into(), json!(winding_number(&exp, q.m, order)?));
    meta.insert("decay_rate_rel_error".into(), json!(decay_rate_error(&exp, q.m, order)?));
    meta.insert("quasi_resonance".into(), json!(exp.quasi_resonance(q.m, order)));
    Ok(document(cfg, meta, t))
}
