//! Command-line front end: argument parsing, configuration resolution,
//! command drivers and result files.

mod commands;
pub mod output;

pub use output::{Cell, Document, Format, Table};

use crate::diskmodel::DiskError;
use crate::geometry::{CurveDescriptor, GeometryError, PermittivityDescriptor};
use crate::rootfind::RootFindError;
use crate::wkb::WkbError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration errors, 3 for numerical failures (and i/o).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::Disk(d) => d.into(),
            E::Geometry(g) => g.into(),
            E::Wkb(w) => w.into(),
            E::RootFind(r) => r.into(),
            E::SpecFun(s) => CliError::Numerical(s.to_string()),
        }
    }
}

impl From<DiskError> for CliError {
    fn from(e: DiskError) -> Self {
        match e {
            DiskError::InvalidConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<RootFindError> for CliError {
    fn from(e: RootFindError) -> Self {
        match e {
            RootFindError::InvalidRegion(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Reparameterization(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<WkbError> for CliError {
    fn from(e: WkbError) -> Self {
        match e {
            WkbError::Geometry(g) => g.into(),
            WkbError::Hierarchy { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// `a:b:n`, n equispaced values from a to b inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRange {
    pub k_min: f64,
    pub k_max: f64,
    pub samples: usize,
}

impl KRange {
    pub fn values(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.k_min];
        }
        let step = (self.k_max - self.k_min) / (self.samples - 1) as f64;
        (0..self.samples).map(|i| self.k_min + step * i as f64).collect()
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return Err(format!("expected a:b:n, got '{s}'"));
        }
        let f = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
        let (k_min, k_max) = (f(p[0])?, f(p[1])?);
        let samples: usize = p[2].trim().parse().map_err(|e| format!("'{}': {e}", p[2]))?;
        if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) || samples < 2 {
            return Err(format!("need 0 < a < b and n ≥ 2, got '{s}'"));
        }
        Ok(KRange { k_min, k_max, samples })
    }
}

/// `lo:hi` pair of reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got '{s}'"))?;
        let f = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
        Ok(Pair(f(a)?, f(b)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Disk,
    Circle,
    Peanut,
}

#[derive(Debug, Parser)]
#[command(name = "metacav", version, about = "Scattering, resonances and surface-plasmon asymptotics for negative-permittivity cavities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stability ratio N_{ε,ρ}(k) over a k-grid (disk only).
    ScatterSweep(SweepArgs),
    /// Resonances and eigenvalues of the disk for m = m_min..=m_max.
    ResonanceMap(MapArgs),
    /// Plasmonic intervals from the WKB expansion (any smooth shape).
    Intervals(IntervalArgs),
    /// Samples of the WKB quasi-mode and residual diagnostics.
    Quasimode(QuasimodeArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON file {"geometry": {...}, "permittivity": {...}, "grid": n}.
    #[arg(long, conflicts_with_all = ["shape", "radius", "eps", "eps_linear"])]
    pub descriptor: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub shape: Option<Shape>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Constant cavity permittivity.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "eps_linear")]
    pub eps: Option<f64>,
    /// ε(x, y) = (ε_m + ε_M)/2 + (ε_M − ε_m)/2 · x given as ε_m:ε_M.
    #[arg(long, allow_hyphen_values = true)]
    pub eps_linear: Option<Pair>,
    /// Boundary grid size (power of two ≥ 64).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// k grid a:b:n.
    #[arg(long)]
    pub k: KRange,
    #[arg(long, default_value_t = 2.0)]
    pub rho: f64,
    #[arg(long = "trunc", default_value_t = 32)]
    pub truncation: usize,
    /// Add geometric refinements around the plasmonic interval centres and
    /// the real-axis near-zeros of the mode determinants.
    #[arg(long)]
    pub refine: bool,
    #[arg(long, default_value_t = 0.5)]
    pub refine_ratio: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub min_spacing: f64,
    /// A peak is flagged when it exceeds this multiple of the median.
    #[arg(long, default_value_t = 10.0)]
    pub peak_factor: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub m_min: i32,
    #[arg(long, default_value_t = 64)]
    pub m_max: i32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    pub m_min: i32,
    #[arg(long, default_value_t = 12)]
    pub m_max: i32,
    /// Hierarchy depth N.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct QuasimodeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 12)]
    pub m: i32,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Samples along the interface.
    #[arg(long, default_value_t = 128)]
    pub ns: usize,
    /// Samples across the collar.
    #[arg(long, default_value_t = 41)]
    pub nxi: usize,
    /// Half-width of the sampled collar as a fraction of δ.
    #[arg(long, default_value_t = 0.5)]
    pub xi_fraction: f64,
    /// Mode indices of the residual sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![8, 16, 32, 64])]
    pub residual_m: Vec<i32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Geometry/permittivity descriptor file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub geometry: CurveDescriptor,
    pub permittivity: PermittivityDescriptor,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    256
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// The fully resolved configuration embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub geometry: CurveDescriptor,
    pub permittivity: PermittivityDescriptor,
    pub grid: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<(i32, i32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasimode: Option<QuasimodeConfig>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k: KRange,
    pub rho: f64,
    pub truncation: usize,
    pub refine: bool,
    pub refine_ratio: f64,
    pub min_spacing: f64,
    pub peak_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeConfig {
    pub m: i32,
    pub ns: usize,
    pub nxi: usize,
    pub xi_fraction: f64,
    pub residual_m: Vec<i32>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<ModelFile> {
        if let Some(p) = &self.descriptor {
            let mut f = ModelFile::load(p)?;
            if let Some(g) = self.grid {
                f.grid = g;
            }
            return Ok(f);
        }
        let radius = self.radius.unwrap_or(1.0);
        let geometry = match self.shape.unwrap_or(Shape::Disk) {
            Shape::Disk | Shape::Circle => CurveDescriptor::Circle { radius },
            Shape::Peanut => {
                if self.radius.is_some() {
                    return Err(CliError::Config("--radius applies to disk/circle only".into()));
                }
                CurveDescriptor::Peanut {}
            }
        };
        let permittivity = match (self.eps, self.eps_linear) {
            (Some(value), None) => PermittivityDescriptor::Constant { value },
            (None, Some(Pair(eps_m, eps_max))) => PermittivityDescriptor::LinearX { eps_m, eps_max },
            (None, None) => return Err(CliError::Config("one of --eps, --eps-linear or --descriptor is required".into())),
            _ => unreachable!("clap enforces the conflict"),
        };
        Ok(ModelFile { geometry, permittivity, grid: self.grid.unwrap_or_else(default_grid) })
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn mode_range(lo: i32, hi: i32, min: i32) -> Result<()> {
    if lo < min || hi < lo {
        return Err(CliError::Config(format!("mode range {lo}..={hi} must satisfy {min} ≤ m_min ≤ m_max")));
    }
    Ok(())
}

impl Command {
    /// Validate the arguments and build the resolved configuration.
    pub fn resolve(&self) -> Result<RunConfig> {
        let (name, model, format) = match self {
            Command::ScatterSweep(a) => ("scatter-sweep", &a.model, a.output.format),
            Command::ResonanceMap(a) => ("resonance-map", &a.model, a.output.format),
            Command::Intervals(a) => ("intervals", &a.model, a.output.format),
            Command::Quasimode(a) => ("quasimode", &a.model, a.output.format),
        };
        let m = model.resolve()?;
        let mut cfg = RunConfig {
            command: name.into(),
            geometry: m.geometry,
            permittivity: m.permittivity,
            grid: m.grid,
            sweep: None,
            modes: None,
            order: None,
            quasimode: None,
            format,
        };
        match self {
            Command::ScatterSweep(a) => {
                positive("--rho", a.rho)?;
                positive("--min-spacing", a.min_spacing)?;
                positive("--peak-factor", a.peak_factor)?;
                if !(a.refine_ratio > 0.0 && a.refine_ratio < 1.0) {
                    return Err(CliError::Config(format!("--refine-ratio must lie in (0, 1), got {}", a.refine_ratio)));
                }
                cfg.sweep = Some(SweepConfig {
                    k: a.k,
                    rho: a.rho,
                    truncation: a.truncation,
                    refine: a.refine,
                    refine_ratio: a.refine_ratio,
                    min_spacing: a.min_spacing,
                    peak_factor: a.peak_factor,
                });
            }
            Command::ResonanceMap(a) => {
                mode_range(a.m_min, a.m_max, 0)?;
                cfg.modes = Some((a.m_min, a.m_max));
            }
            Command::Intervals(a) => {
                mode_range(a.m_min, a.m_max, 1)?;
                cfg.modes = Some((a.m_min, a.m_max));
                cfg.order = Some(a.order);
            }
            Command::Quasimode(a) => {
                mode_range(a.m, a.m, 1)?;
                if a.ns < 2 || a.nxi < 2 {
                    return Err(CliError::Config("--ns and --nxi must be at least 2".into()));
                }
                if !(a.xi_fraction > 0.0 && a.xi_fraction < 1.0) {
                    return Err(CliError::Config(format!("--xi-fraction must lie in (0, 1), got {}", a.xi_fraction)));
                }
                if a.residual_m.iter().any(|&m| m < 1) {
                    return Err(CliError::Config("--residual-m entries must be ≥ 1".into()));
                }
                cfg.order = Some(a.order);
                cfg.quasimode = Some(QuasimodeConfig {
                    m: a.m,
                    ns: a.ns,
                    nxi: a.nxi,
                    xi_fraction: a.xi_fraction,
                    residual_m: a.residual_m.clone(),
                });
            }
        }
        Ok(cfg)
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::ScatterSweep(a) => &a.output,
            Command::ResonanceMap(a) => &a.output,
            Command::Intervals(a) => &a.output,
            Command::Quasimode(a) => &a.output,
        }
    }
}

/// Runs a resolved configuration and returns the result document.
pub fn execute(cfg: &RunConfig) -> Result<Document> {
    match cfg.command.as_str() {
        "scatter-sweep" => commands::run_scatter_sweep(cfg),
        "resonance-map" => commands::run_resonance_map(cfg),
        "intervals" => commands::run_intervals(cfg),
        "quasimode" => commands::run_quasimode(cfg),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    }
}

/// Parse, run and write; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("metacav: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.command.resolve()?;
    let doc = execute(&cfg)?;
    let text = doc.render(cfg.format);
    match &cli.command.output().out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_parsing() {
        let k: KRange = "0.5:8:239".parse().unwrap();
        let v = k.values();
        assert_eq!(v.len(), 239);
        assert_eq!(v[0], 0.5);
        assert!((v[238] - 8.0).abs() < 1e-14);
        assert!("1:2".parse::<KRange>().is_err());
        assert!("2:1:10".parse::<KRange>().is_err());
        assert!("1:2:1".parse::<KRange>().is_err());
    }

    #[test]
    fn flags_resolve_to_descriptors() {
        let cli = Cli::try_parse_from(["metacav", "intervals", "--shape", "peanut", "--eps-linear", "-1.2:-1.1"]).unwrap();
        let cfg = cli.command.resolve().unwrap();
        assert_eq!(cfg.geometry, CurveDescriptor::Peanut {});
        assert_eq!(cfg.permittivity, PermittivityDescriptor::LinearX { eps_m: -1.2, eps_max: -1.1 });
        assert_eq!(cfg.modes, Some((1, 12)));
    }

    #[test]
    fn config_errors_map_to_exit_code_two() {
        assert_eq!(run_from(["metacav", "intervals", "--shape", "disk"]), 2);
        assert_eq!(run_from(["metacav", "intervals", "--eps", "-1.1", "--m-min", "0"]), 2);
        assert_eq!(run_from(["metacav", "bogus"]), 2);
        let e: CliError = WkbError::Hierarchy { order: 1, reason: "x".into() }.into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = DiskError::InvalidConfig("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn descriptor_file_round_trip() {
        let json = r#"{"geometry": {"type": "polar", "cos": [1.0, 0.0, 0.1]}, "permittivity": {"type": "linear_x", "eps_m": -1.2, "eps_M": -1.1}, "grid": 128}"#;
        let f: ModelFile = serde_json::from_str(json).unwrap();
        assert_eq!(f.grid, 128);
        assert!(matches!(f.geometry, CurveDescriptor::Polar { .. }));
        let bad = r#"{"geometry": {"type": "circle", "radius": 1.0}, "permittivity": {"type": "constant", "value": -1.1}, "extra": 1}"#;
        assert!(serde_json::from_str::<ModelFile>(bad).is_err());
    }
}
