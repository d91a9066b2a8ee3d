//! Command-line driver: config parsing, experiment execution and output.
//!
//! Configs are TOML. Physical inputs are in ns and MHz (1 MHz = 10⁶ s⁻¹);
//! internally the pulse width is the unit of time. Grid and sweep time
//! ranges in the config are given in pulse widths; every output file is in
//! ns / MHz / MHz².

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlations::{linspace, phase_sweep, ratio_sweep, CorrelationGrid, Engine, EqualTimeTrace, Kappa, PhaseMap};
use crate::error::Error;
use crate::oracle::{all_passed, run_suite, OracleReport};
use crate::params::{lifetime, total_decay, SystemParams, UnitSystem};
use crate::pulse::GaussianPulse;
use crate::quadrature::{default_truncation, QuadSpec};
use crate::scattering::{pole_offset, reflection_residue};
use crate::twophoton::ChannelPair;

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_QUADRATURE: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

/// Environment variable that overrides the configured output directory.
pub const OUT_ENV: &str = "GIANT_ATOM_OUT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Quadrature(Error),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Quadrature(_) => EXIT_QUADRATURE,
            CliError::Oracle(_) => EXIT_ORACLE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

fn compute_err(e: Error) -> CliError {
    match e {
        Error::NonConvergence { .. } | Error::GridFailure { .. } | Error::DegenerateProbe { .. } => {
            CliError::Quadrature(e)
        }
        other => CliError::Config(other.to_string()),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// config schema

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SingleGrid,
    RatioSweep,
    PhaseSweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetuningMode {
    #[default]
    Resonant,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub channels: ChannelsSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Couplings are given either as per-point decay rates `Γ_j = 2π|g_j|²` in
/// MHz with phases `theta_j`, or as raw `g_j = [re, im]` in √MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2_mhz: Option<f64>,
    #[serde(default)]
    pub theta1: f64,
    #[serde(default)]
    pub theta2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0_over_pi: Option<f64>,
    #[serde(default)]
    pub detuning: DetuningMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_mhz: Option<f64>,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            gamma1_mhz: Some(5.0),
            gamma2_mhz: Some(5.0),
            theta1: 0.0,
            theta2: 0.0,
            g1: None,
            g2: None,
            phi0: None,
            phi0_over_pi: Some(0.5),
            detuning: DetuningMode::Resonant,
            detuning_mhz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub width_ns: f64,
    #[serde(default)]
    pub center_ns: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    0.1
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            width_ns: 100.0,
            center_ns: 0.0,
            alpha: default_alpha(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelsSection {
    #[serde(default = "default_pairs")]
    pub pairs: Vec<String>,
}

fn default_pairs() -> Vec<String> {
    vec!["tt".into()]
}

impl Default for ChannelsSection {
    fn default() -> Self {
        Self { pairs: default_pairs() }
    }
}

/// Time axes in pulse widths relative to the pulse center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_t_min")]
    pub t_min_widths: f64,
    #[serde(default = "default_t_max")]
    pub t_max_widths: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_t_min() -> f64 {
    -4.0
}
fn default_t_max() -> f64 {
    6.0
}
fn default_points() -> usize {
    201
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            t_min_widths: default_t_min(),
            t_max_widths: default_t_max(),
            points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Pulse width over lifetime, for `ratio-sweep`.
    #[serde(default)]
    pub ratios: Vec<f64>,
    /// Write the full grid for every ratio (traces are always written).
    #[serde(default = "yes")]
    pub write_grids: bool,
    /// Pulse width over lifetime at φ0 = 0, for `phase-sweep`.
    #[serde(default = "default_ratio_at_zero")]
    pub ratio_at_zero: f64,
    #[serde(default)]
    pub phi_min_over_pi: f64,
    #[serde(default = "two")]
    pub phi_max_over_pi: f64,
    #[serde(default = "default_phi_points")]
    pub phi_points: usize,
    /// `t1 + t2` of the cut, in pulse widths.
    #[serde(default = "default_cut")]
    pub cut_sum_widths: f64,
    #[serde(default = "two")]
    pub dt_max_widths: f64,
    #[serde(default = "default_dt_points")]
    pub dt_points: usize,
    /// φ0/π values at which full grids are also written in `phase-sweep`.
    #[serde(default)]
    pub grid_panels_over_pi: Vec<f64>,
}

fn yes() -> bool {
    true
}
fn two() -> f64 {
    2.0
}
fn default_ratio_at_zero() -> f64 {
    3.0
}
fn default_phi_points() -> usize {
    73
}
fn default_cut() -> f64 {
    -0.5
}
fn default_dt_points() -> usize {
    81
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            ratios: Vec::new(),
            write_grids: true,
            ratio_at_zero: default_ratio_at_zero(),
            phi_min_over_pi: 0.0,
            phi_max_over_pi: 2.0,
            phi_points: default_phi_points(),
            cut_sum_widths: default_cut(),
            dt_max_widths: 2.0,
            dt_points: default_dt_points(),
            grid_panels_over_pi: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadSpec::default();
        Self {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "yes")]
    pub plot_script: bool,
}

fn default_dir() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            plot_script: true,
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// resolution into internal units

/// Config resolved into internal units (time unit = pulse width).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub units: UnitSystem,
    pub params: SystemParams,
    pub pulse: GaussianPulse,
    pub pairs: Vec<ChannelPair>,
    pub axis: Vec<f64>,
    pub spec: QuadSpec,
}

fn bad(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

fn finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, "must be finite"))
    }
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved, CliError> {
    let p = &cfg.pulse;
    if !(p.width_ns > 0.0 && p.width_ns.is_finite()) {
        return Err(bad("pulse.width_ns", "must be positive and finite"));
    }
    let units = UnitSystem::new(p.width_ns).map_err(|e| bad("pulse.width_ns", e))?;
    let pulse = GaussianPulse::new(1.0, units.time_from_ns(finite("pulse.center_ns", p.center_ns)?), p.alpha)
        .map_err(|e| bad("pulse", e))?;

    let s = &cfg.system;
    let phi0 = match (s.phi0, s.phi0_over_pi) {
        (Some(v), None) => finite("system.phi0", v)?,
        (None, Some(v)) => finite("system.phi0_over_pi", v)? * std::f64::consts::PI,
        (None, None) => return Err(bad("system", "one of phi0 or phi0_over_pi is required")),
        (Some(_), Some(_)) => return Err(bad("system", "give phi0 or phi0_over_pi, not both")),
    };
    let base = match (s.gamma1_mhz, s.gamma2_mhz, s.g1, s.g2) {
        (Some(a), Some(b), None, None) => {
            if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
                return Err(bad("system.gamma*_mhz", "decay rates must be finite and non-negative"));
            }
            SystemParams::from_decay_rates(units.rate_from_mhz(a), units.rate_from_mhz(b), s.theta1, s.theta2, phi0, 0.0)
        }
        (None, None, Some(g1), Some(g2)) => {
            // Γ = 2π|g|², so g scales with the square root of the rate unit
            let scale = units.rate_from_mhz(1.0).sqrt();
            let c = |g: [f64; 2]| Complex64::new(g[0], g[1]) * scale;
            SystemParams::new(c(g1), c(g2), phi0, 0.0)
        }
        _ => {
            return Err(bad(
                "system",
                "give either gamma1_mhz and gamma2_mhz, or g1 and g2",
            ))
        }
    }
    .map_err(|e| bad("system", e))?;
    let params = match s.detuning {
        DetuningMode::Resonant => {
            if s.detuning_mhz.is_some() {
                return Err(bad("system.detuning_mhz", "only allowed with detuning = \"explicit\""));
            }
            base.at_resonance()
        }
        DetuningMode::Explicit => {
            let d = s
                .detuning_mhz
                .ok_or_else(|| bad("system.detuning_mhz", "required with detuning = \"explicit\""))?;
            base.with_delta(units.rate_from_mhz(finite("system.detuning_mhz", d)?))
                .map_err(|e| bad("system.detuning_mhz", e))?
        }
    };

    if cfg.channels.pairs.is_empty() {
        return Err(bad("channels.pairs", "at least one pair is required"));
    }
    let pairs = cfg
        .channels
        .pairs
        .iter()
        .map(|s| s.parse::<ChannelPair>().map_err(|e| bad("channels.pairs", e)))
        .collect::<Result<Vec<_>, _>>()?;

    let g = &cfg.grid;
    if g.points == 0 || !(g.t_max_widths > g.t_min_widths) || !g.t_min_widths.is_finite() || !g.t_max_widths.is_finite() {
        return Err(bad("grid", "need points >= 1 and finite t_min_widths < t_max_widths"));
    }
    let c = pulse.center_time();
    let axis = if g.points == 1 {
        vec![c + g.t_min_widths]
    } else {
        linspace(c + g.t_min_widths, c + g.t_max_widths, g.points)
    };

    let q = &cfg.quadrature;
    let spec = QuadSpec::new(q.abs_tol, q.rel_tol, 10.0, q.max_subdivisions).map_err(|e| bad("quadrature", e))?;

    match cfg.mode {
        Mode::RatioSweep => {
            if cfg.sweep.ratios.is_empty() {
                return Err(bad("sweep.ratios", "required for mode = \"ratio-sweep\""));
            }
            if cfg.sweep.ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return Err(bad("sweep.ratios", "ratios must be positive"));
            }
            if total_decay(&params) == 0.0 {
                return Err(bad("system", "ratio sweep needs a finite lifetime at the base phase"));
            }
        }
        Mode::PhaseSweep => {
            let sw = &cfg.sweep;
            if sw.phi_points == 0 || sw.dt_points == 0 {
                return Err(bad("sweep", "phi_points and dt_points must be positive"));
            }
            if !(sw.ratio_at_zero > 0.0) || !(sw.dt_max_widths >= 0.0) || !(sw.phi_max_over_pi >= sw.phi_min_over_pi) {
                return Err(bad("sweep", "need ratio_at_zero > 0, dt_max_widths >= 0, phi_max >= phi_min"));
            }
            finite("sweep.cut_sum_widths", sw.cut_sum_widths)?;
            if total_decay(&params.with_phi0(0.0).map_err(|e| bad("system", e))?) == 0.0 {
                return Err(bad("system", "couplings vanish at phi0 = 0"));
            }
        }
        _ => {}
    }

    Ok(Resolved {
        units,
        params,
        pulse,
        pairs,
        axis,
        spec,
    })
}

// ---------------------------------------------------------------------------
// output

/// Writes `contents` to `path` via a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(contents.as_bytes()).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

/// Conversions of internal quantities to output units.
struct Out<'a>(&'a UnitSystem);

impl Out<'_> {
    fn ns(&self, t: f64) -> f64 {
        self.0.time_to_ns(t)
    }
    fn mhz(&self, x: f64) -> f64 {
        self.0.rate_to_mhz(x)
    }
    fn mhz2(&self, x: f64) -> f64 {
        self.0.rate_to_mhz(self.0.rate_to_mhz(x))
    }
}

fn header_lines(meta: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

fn point_meta(units: &UnitSystem, params: &SystemParams, kappa: &Kappa) -> Vec<(&'static str, String)> {
    let o = Out(units);
    let gamma = total_decay(params);
    vec![
        ("phi0", num(params.phi0())),
        ("delta_mhz", num(o.mhz(params.delta()))),
        ("gamma_tot_mhz", num(o.mhz(gamma))),
        (
            "tau_life_ns",
            lifetime(params).map(|t| num(o.ns(t))).unwrap_or_else(|_| "inf".into()),
        ),
        ("kappa_re", num(kappa.value.re)),
        ("kappa_im", num(kappa.value.im)),
    ]
}

pub fn grid_csv(grid: &CorrelationGrid, units: &UnitSystem, extra: &[(&str, String)]) -> String {
    let o = Out(units);
    let mut meta: Vec<(&str, String)> = vec![("pair", grid.pair.to_string())];
    meta.extend(extra.iter().cloned());
    meta.extend(point_meta(units, &grid.params, &grid.kappa));
    meta.push(("masked", grid.masked_count().to_string()));
    meta.push(("units", "t:ns psi2:MHz g2,c2,intensity_product:MHz^2".into()));
    let mut s = header_lines(&meta);
    s.push_str("t1,t2,re_psi2,im_psi2,g2,c2,intensity_product,masked\n");
    for (i, &t1) in grid.t1_axis.iter().enumerate() {
        for (j, &t2) in grid.t2_axis.iter().enumerate() {
            let n = grid.index(i, j);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                num(o.ns(t1)),
                num(o.ns(t2)),
                num(o.mhz(grid.psi2[n].re)),
                num(o.mhz(grid.psi2[n].im)),
                num(o.mhz2(grid.g2[n])),
                num(o.mhz2(grid.c2[n])),
                num(o.mhz2(grid.intensity_product[n])),
                u8::from(grid.masked[n])
            );
        }
    }
    s
}

pub fn trace_csv(trace: &EqualTimeTrace, units: &UnitSystem, meta: &[(&str, String)]) -> String {
    let o = Out(units);
    let mut m = meta.to_vec();
    m.push(("units", "t:ns c2_diag,intensity:MHz^2 (intensity = I(t)I(t))".into()));
    let mut s = header_lines(&m);
    s.push_str("t,c2_diag,intensity\n");
    for ((t, c), i) in trace.t.iter().zip(&trace.c2).zip(&trace.intensity_product) {
        let _ = writeln!(s, "{},{},{}", num(o.ns(*t)), num(o.mhz2(*c)), num(o.mhz2(*i)));
    }
    s
}

pub fn sweep_csv(map: &PhaseMap, units: &UnitSystem, meta: &[(&str, String)], diagonal_only: bool) -> String {
    let o = Out(units);
    let mut m = meta.to_vec();
    m.push(("cut_sum_ns", num(o.ns(map.cut_sum))));
    m.push(("kappa_re", num(map.kappa.value.re)));
    m.push(("kappa_im", num(map.kappa.value.im)));
    m.push(("units", "phi0:rad dt:ns c2:MHz^2 (dt = t1 - t2)".into()));
    let mut s = header_lines(&m);
    s.push_str("phi0,dt,c2\n");
    for (i, &phi) in map.phi_axis.iter().enumerate() {
        if diagonal_only {
            let _ = writeln!(s, "{},{},{}", num(phi), num(0.0), num(o.mhz2(map.diagonal[i])));
            continue;
        }
        for (j, &dt) in map.dt_axis.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", num(phi), num(o.ns(dt)), num(o.mhz2(map.c2_at(i, j))));
        }
    }
    s
}

// ---------------------------------------------------------------------------
// manifest

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub run: RunInfo,
    pub config: RunConfig,
    pub derived: Derived,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub tool: String,
    pub version: String,
    pub generated_unix: u64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub time_unit_ns: f64,
    pub frequency_unit_mhz: f64,
    pub flux_scale_alpha_sq: f64,
    pub quadrature_abs_tol: f64,
    pub quadrature_rel_tol: f64,
    pub points: Vec<DerivedPoint>,
}

/// Fully resolved parameters of one computed configuration.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedPoint {
    pub label: String,
    pub g1: [f64; 2],
    pub g2: [f64; 2],
    pub g_unit: String,
    pub phi0: f64,
    pub delta_mhz: f64,
    pub gamma_tot_mhz: f64,
    /// Absent at the decoupled point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_life_ns: Option<f64>,
    pub ratio_width_over_lifetime: f64,
    pub pole_offset_mhz: [f64; 2],
    pub reflection_residue_mhz: [f64; 2],
    pub truncation_mhz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masked: Option<usize>,
}

fn derived_point(label: String, r: &Resolved, params: &SystemParams, kappa: Option<&Kappa>, masked: Option<usize>) -> DerivedPoint {
    let o = Out(&r.units);
    let scale = r.units.rate_from_mhz(1.0).sqrt();
    let c = pole_offset(params);
    let d = reflection_residue(params);
    let gamma = total_decay(params);
    DerivedPoint {
        label,
        g1: [params.g1().re / scale, params.g1().im / scale],
        g2: [params.g2().re / scale, params.g2().im / scale],
        g_unit: "sqrt(MHz)".into(),
        phi0: params.phi0(),
        delta_mhz: o.mhz(params.delta()),
        gamma_tot_mhz: o.mhz(gamma),
        tau_life_ns: lifetime(params).ok().map(|t| o.ns(t)),
        ratio_width_over_lifetime: gamma * r.pulse.width(),
        pole_offset_mhz: [o.mhz(c.re), o.mhz(c.im)],
        reflection_residue_mhz: [o.mhz(d.re), o.mhz(d.im)],
        truncation_mhz: o.mhz(default_truncation(&r.pulse, c)),
        kappa: kappa.map(|k| [k.value.re, k.value.im]),
        kappa_probes: kappa.map(|k| k.probes),
        masked,
    }
}

// ---------------------------------------------------------------------------
// execution

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub manifest: Manifest,
    pub oracle: Vec<OracleReport>,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn put(&mut self, name: String, contents: &str) -> Result<(), CliError> {
        write_atomic(&self.dir.join(&name), contents)?;
        self.files.push(name);
        Ok(())
    }
}

fn ratio_tag(r: f64) -> String {
    format!("{r}")
}

/// Executes a parsed config, writing all outputs into `out_dir`.
pub fn execute(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    let r = resolve(cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut w = Writer {
        dir: out_dir,
        files: Vec::new(),
    };
    let mut points = Vec::new();
    let mut oracle = Vec::new();

    match cfg.mode {
        Mode::SingleGrid => {
            for &pair in &r.pairs {
                let engine = Engine::new(r.params, r.pulse, r.spec).map_err(compute_err)?;
                let grid = engine.compute_grid(pair, &r.axis, &r.axis, None).map_err(compute_err)?;
                w.put(format!("grid_{pair}.csv"), &grid_csv(&grid, &r.units, &[("mode", "single-grid".into())]))?;
                if let Some(trace) = grid.diagonal() {
                    let mut meta = vec![("pair", pair.to_string())];
                    meta.extend(point_meta(&r.units, &grid.params, &grid.kappa));
                    w.put(format!("trace_{pair}.csv"), &trace_csv(&trace, &r.units, &meta))?;
                }
                points.push(derived_point(format!("{pair}"), &r, &r.params, Some(&grid.kappa), Some(grid.masked_count())));
            }
        }
        Mode::RatioSweep => {
            for &pair in &r.pairs {
                let sweep = ratio_sweep(&r.params, &r.pulse, &cfg.sweep.ratios, pair, &r.axis, &r.spec).map_err(compute_err)?;
                for pt in &sweep {
                    let tag = ratio_tag(pt.ratio);
                    let extra = [("mode", "ratio-sweep".to_string()), ("ratio", tag.clone())];
                    if cfg.sweep.write_grids {
                        w.put(format!("grid_{pair}_ratio_{tag}.csv"), &grid_csv(&pt.grid, &r.units, &extra))?;
                    }
                    let mut meta = vec![("pair", pair.to_string()), ("ratio", tag.clone())];
                    meta.extend(point_meta(&r.units, &pt.params, &pt.grid.kappa));
                    w.put(format!("trace_{pair}_ratio_{tag}.csv"), &trace_csv(&pt.trace, &r.units, &meta))?;
                    points.push(derived_point(
                        format!("{pair} ratio={tag}"),
                        &r,
                        &pt.params,
                        Some(&pt.grid.kappa),
                        Some(pt.grid.masked_count()),
                    ));
                }
            }
        }
        Mode::PhaseSweep => {
            let sw = &cfg.sweep;
            let pi = std::f64::consts::PI;
            let phis = linspace(sw.phi_min_over_pi * pi, sw.phi_max_over_pi * pi, sw.phi_points);
            let dts = linspace(-sw.dt_max_widths, sw.dt_max_widths, sw.dt_points);
            let cut = 2.0 * r.pulse.center_time() + sw.cut_sum_widths;
            for &pair in &r.pairs {
                let map = phase_sweep(&r.params, &r.pulse, sw.ratio_at_zero, &phis, cut, &dts, pair, &r.spec)
                    .map_err(compute_err)?;
                let meta = [("pair", pair.to_string()), ("mode", "phase-sweep".into())];
                w.put(format!("sweep_{pair}.csv"), &sweep_csv(&map, &r.units, &meta, false))?;
                w.put(format!("sweep_{pair}_diagonal.csv"), &sweep_csv(&map, &r.units, &meta, true))?;
                points.push(derived_point(format!("{pair} reference phi0=0"), &r, &map.reference, Some(&map.kappa), None));
                for &panel in &sw.grid_panels_over_pi {
                    let params = map
                        .reference
                        .with_phi0(panel * pi)
                        .map_err(|e| bad("sweep.grid_panels_over_pi", e))?
                        .at_resonance();
                    let engine = Engine::new(params, r.pulse, r.spec).map_err(compute_err)?;
                    let grid = engine
                        .compute_grid(pair, &r.axis, &r.axis, Some(map.kappa))
                        .map_err(compute_err)?;
                    let tag = format!("{panel}");
                    let extra = [("mode", "phase-sweep".to_string()), ("phi0_over_pi", tag.clone())];
                    w.put(format!("grid_{pair}_phi_{tag}pi.csv"), &grid_csv(&grid, &r.units, &extra))?;
                    points.push(derived_point(
                        format!("{pair} phi0={tag}pi"),
                        &r,
                        &params,
                        Some(&map.kappa),
                        Some(grid.masked_count()),
                    ));
                }
            }
        }
        Mode::Validate => {
            oracle = run_suite(cfg.seed);
            w.put("oracle.csv".into(), &oracle_csv(&oracle))?;
        }
    }

    if cfg.output.plot_script && cfg.mode != Mode::Validate {
        w.put("plot.py".into(), &plot_script(cfg.mode, &w.files))?;
    }

    let manifest = Manifest {
        run: RunInfo {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            files: w.files.clone(),
        },
        config: cfg.clone(),
        derived: Derived {
            time_unit_ns: r.units.time_unit_ns(),
            frequency_unit_mhz: r.units.frequency_unit_mhz(),
            flux_scale_alpha_sq: r.pulse.alpha() * r.pulse.alpha(),
            quadrature_abs_tol: r.spec.abs_tol,
            quadrature_rel_tol: r.spec.rel_tol,
            points,
        },
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Io(format!("manifest: {e}")))?;
    write_atomic(&out_dir.join("manifest.toml"), &text)?;

    if cfg.mode == Mode::Validate && !all_passed(&oracle) {
        let failed: Vec<&str> = oracle.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        return Err(CliError::Oracle(failed.join(", ")));
    }
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        files: w.files,
        manifest,
        oracle,
    })
}

pub fn oracle_csv(reports: &[OracleReport]) -> String {
    let mut s = String::from("name,passed,max_abs_deviation,max_rel_deviation,samples,tolerance,seed,note\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},\"{}\"",
            r.name,
            r.passed,
            num(r.max_abs_deviation),
            num(r.max_rel_deviation),
            r.samples,
            num(r.tolerance),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.note.replace('"', "'")
        );
    }
    s
}

pub fn oracle_table(reports: &[OracleReport]) -> String {
    let mut s = format!(
        "{:<22} {:>6} {:>12} {:>12} {:>9} {:>9}\n",
        "check", "pass", "max_abs", "max_rel", "samples", "tol"
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{:<22} {:>6} {:>12.3e} {:>12.3e} {:>9} {:>9.1e}{}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.max_abs_deviation,
            r.max_rel_deviation,
            r.samples,
            r.tolerance,
            if r.note.is_empty() { String::new() } else { format!("  ({})", r.note) }
        );
    }
    s
}

/// Matplotlib script that lays out the written CSVs as figure panels.
pub fn plot_script(mode: Mode, files: &[String]) -> String {
    let list: Vec<String> = files.iter().filter(|f| f.ends_with(".csv")).map(|f| format!("    {f:?},")).collect();
    let body = match mode {
        Mode::SingleGrid | Mode::RatioSweep => PLOT_GRIDS,
        Mode::PhaseSweep => PLOT_SWEEP,
        Mode::Validate => "",
    };
    format!("{PLOT_HEAD}FILES = [\n{}\n]\n{body}", list.join("\n"))
}

const PLOT_HEAD: &str = r##"#!/usr/bin/env python3
# Generated by giant-atom. Usage: python3 plot.py [output.png]
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent


def load(name):
    lines = [l for l in (HERE / name).read_text().splitlines() if not l.startswith("#")]
    return np.genfromtxt(lines, delimiter=",", names=True)


"##;

const PLOT_GRIDS: &str = r##"
grids = [f for f in FILES if f.startswith("grid_")]
traces = [f for f in FILES if f.startswith("trace_")]
ncol = max(len(grids), 1)
fig, axes = plt.subplots(2, ncol, figsize=(3.2 * ncol, 6), squeeze=False)
for ax, name in zip(axes[0], grids):
    d = load(name)
    t1, t2 = np.unique(d["t1"]), np.unique(d["t2"])
    c2 = d["c2"].reshape(len(t1), len(t2))
    lim = np.nanmax(np.abs(c2)) or 1.0
    im = ax.pcolormesh(t1, t2, c2.T, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
    ax.set_title(name[5:-4], fontsize=8)
    ax.set_xlabel("t1 (ns)")
    ax.set_ylabel("t2 (ns)")
    fig.colorbar(im, ax=ax, label="C2 (MHz^2)")
for ax in axes[0][len(grids):]:
    ax.axis("off")
ax = axes[1][0]
for name in traces:
    d = load(name)
    ax.plot(d["t"], d["c2_diag"], label=name[6:-4])
ax.axhline(0, color="k", lw=0.5)
ax.set_xlabel("t (ns)")
ax.set_ylabel("C2(t,t) (MHz^2)")
ax.legend(fontsize=7)
if len(traces) == 1 and ncol > 1:
    d = load(traces[0])
    axes[1][1].plot(d["t"], d["intensity"], color="tab:orange")
    axes[1][1].set_xlabel("t (ns)")
    axes[1][1].set_ylabel("I(t)I(t) (MHz^2)")
for ax in axes[1][1 + (len(traces) == 1):]:
    ax.axis("off")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else HERE / "plot.png", dpi=150)
"##;

const PLOT_SWEEP: &str = r##"
maps = [f for f in FILES if f.startswith("sweep_") and not f.endswith("_diagonal.csv")]
fig, axes = plt.subplots(len(maps), 2, figsize=(9, 3.5 * len(maps)), squeeze=False)
for row, name in zip(axes, maps):
    d = load(name)
    phi, dt = np.unique(d["phi0"]), np.unique(d["dt"])
    c2 = d["c2"].reshape(len(phi), len(dt))
    lim = np.nanmax(np.abs(c2)) or 1.0
    im = row[0].pcolormesh(phi / np.pi, dt, c2.T, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
    row[0].set_xlabel("phi0 / pi")
    row[0].set_ylabel("t1 - t2 (ns)")
    fig.colorbar(im, ax=row[0], label="C2 (MHz^2)")
    diag = load(name[:-4] + "_diagonal.csv")
    row[1].plot(diag["phi0"] / np.pi, diag["c2"])
    row[1].axhline(0, color="k", lw=0.5)
    row[1].set_xlabel("phi0 / pi")
    row[1].set_ylabel("C2(t,t) (MHz^2)")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else HERE / "plot.png", dpi=150)
"##;

// ---------------------------------------------------------------------------
// recipes

pub struct Recipe {
    pub name: &'static str,
    pub text: &'static str,
}

impl Recipe {
    /// First comment line of the recipe.
    pub fn description(&self) -> &'static str {
        self.text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .map(str::trim)
            .unwrap_or("")
    }
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "fig2",
        text: include_str!("../recipes/fig2.toml"),
    },
    Recipe {
        name: "fig3",
        text: include_str!("../recipes/fig3.toml"),
    },
    Recipe {
        name: "fig4",
        text: include_str!("../recipes/fig4.toml"),
    },
    Recipe {
        name: "fig5",
        text: include_str!("../recipes/fig5.toml"),
    },
    Recipe {
        name: "appF",
        text: include_str!("../recipes/appF.toml"),
    },
];

pub fn recipe(name: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name)
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(name = "giant-atom", version, about = "Photon correlations of a weak pulse scattered by a two-point giant atom")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config and the environment.
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
        /// Worker threads for grid evaluation.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the oracle suite.
    Validate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write oracle.csv here.
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
    },
    /// Bundled configs for the standard figure set.
    Recipes {
        #[command(subcommand)]
        action: RecipeAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum RecipeAction {
    List,
    /// Print a recipe, e.g. `recipes show fig3 > fig3.toml`.
    Show { name: String },
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("giant-atom: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, threads } => {
            let cfg = load_config(&config)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
            let summary = with_threads(threads, || execute(&cfg, &dir))??;
            if cfg.mode == Mode::Validate {
                print!("{}", oracle_table(&summary.oracle));
            }
            println!("wrote {} files to {}", summary.files.len() + 1, summary.out_dir.display());
            Ok(())
        }
        Command::Validate { seed, out } => {
            let reports = run_suite(seed);
            print!("{}", oracle_table(&reports));
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
                write_atomic(&dir.join("oracle.csv"), &oracle_csv(&reports))?;
            }
            if all_passed(&reports) {
                Ok(())
            } else {
                let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
                Err(CliError::Oracle(failed.join(", ")))
            }
        }
        Command::Recipes { action } => match action {
            RecipeAction::List => {
                for r in RECIPES {
                    println!("{:<6} {}", r.name, r.description());
                }
                Ok(())
            }
            RecipeAction::Show { name } => {
                let r = recipe(&name).ok_or_else(|| CliError::Config(format!("unknown recipe `{name}`")))?;
                print!("{}", r.text);
                Ok(())
            }
        },
    }
}
