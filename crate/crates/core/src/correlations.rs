//! Output wavefunctions and second-order correlation functions.
//!
//! The single-photon wavefunction is `ψ¹_μ(t) = (2π)^{-1/2} ∫ f(k) e^{-ikt} χ^μ(k) dk`.
//! The two-photon wavefunction is `κ ψ¹_μ(t1) ψ¹_μ'(t2) + N(t1, t2 - t1)`
//! where `κ = √2` and the bound-state term is
//! `N(t, τ) = -(i/√2) e^{iC|τ|} D³B_c [∫ f(k) e^{-ik min(t, t+τ)} /(k + C) dk]²`.
//!
//! Correlations are normalized as `C² = G²/|κ|² − I_μ(t1) I_μ'(t2)`, which is
//! zero for a coherent output field. `κ` is measured from the wavefunction in
//! the factorization regime rather than assumed.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{lifetime, total_decay, SystemParams};
use crate::pulse::GaussianPulse;
use crate::quadrature::{default_truncation, integrate, QuadSpec};
use crate::scattering::{chi, pole_offset, Channel};
use crate::twophoton::{pair_strength, ChannelPair};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Probe amplitudes below this magnitude are not used for calibrating κ.
pub const PROBE_FLOOR: f64 = 1e-9;

/// Minimum probe separation in units of the atomic lifetime.
pub const PROBE_SEPARATION_LIFETIMES: f64 = 20.0;

/// Earlier probe times, in pulse widths relative to the pulse center. The
/// bound-state term is negligible against the product term only when the
/// earlier photon sits far out on the leading edge of the pulse: its relative
/// weight is about 1e-7 at -4 widths and below 1e-12 at -6.
pub const PROBE_SET_A: [f64; 2] = [-5.5, -6.0];
pub const PROBE_SET_B: [f64; 2] = [-5.25, -5.75];

/// Quadrature settings for κ probes: the later probe amplitude is of order
/// `e^{-20}`, so the absolute target is tightened accordingly.
fn probe_spec(spec: &QuadSpec) -> QuadSpec {
    spec.with_abs_tol(spec.abs_tol.min(1e-13))
        .with_rel_tol(spec.rel_tol.min(1e-10))
        .with_max_subdivisions(spec.max_subdivisions.max(20_000))
}

/// Evaluates wavefunctions and correlations for one parameter set and pulse.
#[derive(Debug, Clone)]
pub struct Engine {
    params: SystemParams,
    pulse: GaussianPulse,
    spec: QuadSpec,
    pole: Complex64,
}

impl Engine {
    /// Uses the tolerances of `spec` and replaces its truncation radius by
    /// [`default_truncation`] for this pulse and pole.
    pub fn new(params: SystemParams, pulse: GaussianPulse, spec: QuadSpec) -> Result<Self> {
        spec.validate()?;
        let pole = pole_offset(&params);
        let spec = spec.with_truncation(default_truncation(&pulse, pole));
        Ok(Self {
            params,
            pulse,
            spec,
            pole,
        })
    }

    /// Keeps the truncation radius of `spec` as given.
    pub fn with_spec(params: SystemParams, pulse: GaussianPulse, spec: QuadSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            params,
            pulse,
            spec,
            pole: pole_offset(&params),
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn pulse(&self) -> &GaussianPulse {
        &self.pulse
    }

    pub fn spec(&self) -> &QuadSpec {
        &self.spec
    }

    fn transform(&self, spec: &QuadSpec, t: f64, g: impl Fn(f64) -> Complex64) -> Result<Complex64> {
        let pulse = &self.pulse;
        integrate(
            |k| pulse.spectral_amplitude(k) * Complex64::from_polar(1.0, -k * t) * g(k),
            spec,
        )
        .map(|r| r.value)
    }

    fn psi1_with(&self, spec: &QuadSpec, channel: Channel, t: f64) -> Result<Complex64> {
        let params = &self.params;
        let v = self.transform(spec, t, |k| chi(params, channel, k))?;
        Ok(v / TAU.sqrt())
    }

    /// Single-photon output wavefunction in `channel`, units `1/√time`.
    pub fn psi1(&self, channel: Channel, t: f64) -> Result<Complex64> {
        self.psi1_with(&self.spec, channel, t)
    }

    /// `I_μ(t) = |ψ¹_μ(t)|²`.
    pub fn intensity(&self, channel: Channel, t: f64) -> Result<f64> {
        self.psi1(channel, t).map(|v| v.norm_sqr())
    }

    fn pole_integral_with(&self, spec: &QuadSpec, t: f64) -> Result<Complex64> {
        let pole = self.pole;
        self.transform(spec, t, |k| 1.0 / (k + pole))
    }

    /// `∫ f(k) e^{-ikt} / (k + C) dk`.
    pub fn pole_integral(&self, t: f64) -> Result<Complex64> {
        self.pole_integral_with(&self.spec, t)
    }

    /// `∫ f(k) e^{-ikt} r_r(k) dk`, the bracket of the bound-state term.
    pub fn reflection_bracket(&self, t: f64) -> Result<Complex64> {
        let params = &self.params;
        self.transform(&self.spec, t, |k| crate::scattering::r_r(params, k))
    }

    fn has_bound_state(&self, pair: ChannelPair) -> bool {
        pair_strength(&self.params, pair) != Complex64::new(0.0, 0.0)
    }

    /// Assembles `N` from a precomputed pole integral at `min(t, t+dt)`.
    fn bound_state(&self, pair: ChannelPair, dt: f64, pole_integral: Complex64) -> Complex64 {
        let envelope = (I * self.pole * dt.abs()).exp();
        -I / SQRT_2 * envelope * pair_strength(&self.params, pair) * pole_integral * pole_integral
    }

    /// Bound-state (nonlinear) part of the two-photon wavefunction for
    /// detection at `t` and `t + dt`.
    pub fn nonlinear_term(&self, pair: ChannelPair, t: f64, dt: f64) -> Result<Complex64> {
        if !self.has_bound_state(pair) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let j = self.pole_integral(t.min(t + dt))?;
        Ok(self.bound_state(pair, dt, j))
    }

    fn psi2_with(
        &self,
        spec: &QuadSpec,
        pair: ChannelPair,
        t1: f64,
        t2: f64,
        with_bound_state: bool,
    ) -> Result<Complex64> {
        let product = SQRT_2 * self.psi1_with(spec, pair.first, t1)? * self.psi1_with(spec, pair.second, t2)?;
        if !with_bound_state || !self.has_bound_state(pair) {
            return Ok(product);
        }
        let j = self.pole_integral_with(spec, t1.min(t2))?;
        Ok(product + self.bound_state(pair, t2 - t1, j))
    }

    /// Two-photon output wavefunction, units `1/time`.
    pub fn psi2(&self, pair: ChannelPair, t1: f64, t2: f64) -> Result<Complex64> {
        self.psi2_with(&self.spec, pair, t1, t2, true)
    }

    /// Two-photon wavefunction with the bound-state term removed.
    pub fn psi2_without_bound_state(&self, pair: ChannelPair, t1: f64, t2: f64) -> Result<Complex64> {
        self.psi2_with(&self.spec, pair, t1, t2, false)
    }

    /// `G² = |ψ²|²`.
    pub fn g2_unnormalized(&self, pair: ChannelPair, t1: f64, t2: f64) -> Result<f64> {
        self.psi2(pair, t1, t2).map(|v| v.norm_sqr())
    }

    /// `C² = G²/|κ|² − I_μ(t1) I_μ'(t2)`; positive means bunching.
    pub fn c2_normalized(&self, pair: ChannelPair, t1: f64, t2: f64, kappa: &Kappa) -> Result<f64> {
        let g2 = self.g2_unnormalized(pair, t1, t2)?;
        let ii = self.intensity(pair.first, t1)? * self.intensity(pair.second, t2)?;
        Ok(g2 / kappa.value.norm_sqr() - ii)
    }

    /// Probe separation `20 τ_life`. At the decoupled point the bound-state
    /// term vanishes identically and five pulse widths are used, which keeps
    /// the later probe inside the pulse.
    pub fn probe_separation(&self) -> f64 {
        match lifetime(&self.params) {
            Ok(tau) => PROBE_SEPARATION_LIFETIMES * tau,
            Err(_) => 5.0 * self.pulse.width(),
        }
    }

    /// Measures `κ = ψ²(t1, t2) / (ψ¹(t1) ψ¹(t2))` at widely separated probe pairs.
    pub fn calibrate_kappa(&self, pair: ChannelPair) -> Result<Kappa> {
        let offsets: Vec<f64> = PROBE_SET_A.iter().chain(&PROBE_SET_B).copied().collect();
        self.calibrate_kappa_at(pair, &offsets)
    }

    /// As [`Engine::calibrate_kappa`] with explicit earlier-probe offsets in
    /// pulse widths from the pulse center.
    pub fn calibrate_kappa_at(&self, pair: ChannelPair, offsets: &[f64]) -> Result<Kappa> {
        let spec = probe_spec(&self.spec);
        let separation = self.probe_separation();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut used = 0;
        for &offset in offsets {
            let t1 = self.pulse.center_time() + offset * self.pulse.width();
            let t2 = t1 + separation;
            let a = self.psi1_with(&spec, pair.first, t1)?;
            let b = self.psi1_with(&spec, pair.second, t2)?;
            if a.norm() < PROBE_FLOOR || b.norm() < PROBE_FLOOR {
                continue;
            }
            let psi2 = self.psi2_with(&spec, pair, t1, t2, true)?;
            sum += psi2 / (a * b);
            used += 1;
        }
        if used == 0 {
            return Err(Error::DegenerateProbe {
                threshold: PROBE_FLOOR,
            });
        }
        Ok(Kappa {
            value: sum / used as f64,
            probes: used,
            separation,
        })
    }

    /// Materializes all correlation arrays on a `t1_axis × t2_axis` grid.
    ///
    /// `kappa = None` calibrates κ for this parameter set first.
    pub fn compute_grid(
        &self,
        pair: ChannelPair,
        t1_axis: &[f64],
        t2_axis: &[f64],
        kappa: Option<Kappa>,
    ) -> Result<CorrelationGrid> {
        for (name, axis) in [("t1_axis", t1_axis), ("t2_axis", t2_axis)] {
            if axis.is_empty()
                || axis.iter().any(|t| !t.is_finite())
                || axis.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "axis must be non-empty, finite and strictly increasing".into(),
                });
            }
        }
        let kappa = match kappa {
            Some(k) => k,
            None => self.calibrate_kappa(pair)?,
        };
        let bound = self.has_bound_state(pair);
        let column = |channel: Channel, axis: &[f64]| -> Vec<Option<AxisSample>> {
            par_map(axis.len(), |i| {
                let t = axis[i];
                let psi1 = self.psi1(channel, t).ok()?;
                let pole = if bound {
                    self.pole_integral(t).ok()?
                } else {
                    Complex64::new(0.0, 0.0)
                };
                Some(AxisSample { psi1, pole })
            })
        };
        let first = column(pair.first, t1_axis);
        let second = column(pair.second, t2_axis);

        let n2 = t2_axis.len();
        let points: Vec<Option<GridPoint>> = par_map(t1_axis.len() * n2, |idx| {
            let (i, j) = (idx / n2, idx % n2);
            let (a, b) = (first[i].as_ref()?, second[j].as_ref()?);
            let (t1, t2) = (t1_axis[i], t2_axis[j]);
            let mut psi2 = SQRT_2 * a.psi1 * b.psi1;
            if bound {
                let j_min = if t1 <= t2 { a.pole } else { b.pole };
                psi2 += self.bound_state(pair, t2 - t1, j_min);
            }
            let g2 = psi2.norm_sqr();
            let ii = a.psi1.norm_sqr() * b.psi1.norm_sqr();
            Some(GridPoint {
                psi2,
                g2,
                c2: g2 / kappa.value.norm_sqr() - ii,
                intensity_product: ii,
            })
        });

        let total = points.len();
        let masked_count = points.iter().filter(|p| p.is_none()).count();
        if masked_count * 100 > total {
            return Err(Error::GridFailure {
                masked: masked_count,
                total,
            });
        }
        let nan = f64::NAN;
        let mut grid = CorrelationGrid {
            t1_axis: t1_axis.to_vec(),
            t2_axis: t2_axis.to_vec(),
            psi2: Vec::with_capacity(total),
            g2: Vec::with_capacity(total),
            c2: Vec::with_capacity(total),
            intensity_product: Vec::with_capacity(total),
            masked: Vec::with_capacity(total),
            pair,
            params: self.params,
            pulse: self.pulse,
            kappa,
        };
        for p in points {
            let p = p.unwrap_or(GridPoint {
                psi2: Complex64::new(nan, nan),
                g2: nan,
                c2: nan,
                intensity_product: nan,
            });
            let masked = p.g2.is_nan();
            grid.psi2.push(p.psi2);
            grid.g2.push(p.g2);
            grid.c2.push(p.c2);
            grid.intensity_product.push(p.intensity_product);
            grid.masked.push(masked);
        }
        Ok(grid)
    }
}

struct AxisSample {
    psi1: Complex64,
    pole: Complex64,
}

struct GridPoint {
    psi2: Complex64,
    g2: f64,
    c2: f64,
    intensity_product: f64,
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Measured proportionality constant between the two-photon wavefunction and
/// the product of single-photon wavefunctions; `√2` in theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: Complex64,
    pub probes: usize,
    pub separation: f64,
}

impl Kappa {
    /// The theoretical value, for callers that do not calibrate.
    pub fn nominal() -> Self {
        Self {
            value: Complex64::new(SQRT_2, 0.0),
            probes: 0,
            separation: f64::INFINITY,
        }
    }
}

/// Correlation arrays on a rectangular `(t1, t2)` grid, stored row-major
/// with `t1` as the slow index. Masked points hold NaN.
#[derive(Debug, Clone)]
pub struct CorrelationGrid {
    pub t1_axis: Vec<f64>,
    pub t2_axis: Vec<f64>,
    pub psi2: Vec<Complex64>,
    pub g2: Vec<f64>,
    pub c2: Vec<f64>,
    pub intensity_product: Vec<f64>,
    pub masked: Vec<bool>,
    pub pair: ChannelPair,
    pub params: SystemParams,
    pub pulse: GaussianPulse,
    pub kappa: Kappa,
}

impl CorrelationGrid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.t2_axis.len() + j
    }

    pub fn c2_at(&self, i: usize, j: usize) -> f64 {
        self.c2[self.index(i, j)]
    }

    pub fn masked_count(&self) -> usize {
        self.masked.iter().filter(|m| **m).count()
    }

    /// Equal-time trace; defined when both axes coincide.
    pub fn diagonal(&self) -> Option<EqualTimeTrace> {
        if self.t1_axis != self.t2_axis {
            return None;
        }
        let n = self.t1_axis.len();
        Some(EqualTimeTrace {
            t: self.t1_axis.clone(),
            c2: (0..n).map(|i| self.c2_at(i, i)).collect(),
            intensity_product: (0..n).map(|i| self.intensity_product[self.index(i, i)]).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualTimeTrace {
    pub t: Vec<f64>,
    pub c2: Vec<f64>,
    /// `I_μ(t) I_μ'(t)`.
    pub intensity_product: Vec<f64>,
}

impl EqualTimeTrace {
    pub fn max_c2(&self) -> f64 {
        self.c2.iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_c2(&self) -> f64 {
        self.c2.iter().copied().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min)
    }

    /// Signs of the significant lobes in time order: values within
    /// `threshold` of zero are skipped and consecutive equal signs merged.
    pub fn lobe_signs(&self, threshold: f64) -> Vec<i8> {
        let mut signs: Vec<i8> = Vec::new();
        for &v in &self.c2 {
            let s = if v > threshold {
                1
            } else if v < -threshold {
                -1
            } else {
                continue;
            };
            if signs.last() != Some(&s) {
                signs.push(s);
            }
        }
        signs
    }
}

/// `n` evenly spaced samples on `[start, end]`.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Default grid axis: `[-4δ_t, 6δ_t]` around the pulse center, 201 points.
pub fn default_axis(pulse: &GaussianPulse) -> Vec<f64> {
    let c = pulse.center_time();
    let w = pulse.width();
    linspace(c - 4.0 * w, c + 6.0 * w, 201)
}

/// Rescales the couplings so that `δ_t/τ_life = ratio`, keeping φ0, then
/// retunes the detuning to resonance.
pub fn params_for_ratio(base: &SystemParams, pulse: &GaussianPulse, ratio: f64) -> Result<SystemParams> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "ratio",
            reason: format!("{ratio} must be positive and finite"),
        });
    }
    let gamma = total_decay(base);
    if gamma == 0.0 {
        return Err(Error::InfiniteLifetime);
    }
    let target = ratio / pulse.width();
    Ok(base.scale_couplings((target / gamma).sqrt())?.at_resonance())
}

#[derive(Debug, Clone)]
pub struct RatioPoint {
    pub ratio: f64,
    pub params: SystemParams,
    pub grid: CorrelationGrid,
    pub trace: EqualTimeTrace,
}

/// Correlation grids for several pulse-width to lifetime ratios at fixed
/// pulse width and φ0.
///
/// κ is calibrated once, at the member with the largest ratio (the best
/// conditioned probe amplitudes), and shared by every grid of the sweep.
pub fn ratio_sweep(
    base: &SystemParams,
    pulse: &GaussianPulse,
    ratios: &[f64],
    pair: ChannelPair,
    axis: &[f64],
    spec: &QuadSpec,
) -> Result<Vec<RatioPoint>> {
    if ratios.is_empty() {
        return Err(Error::InvalidParameter {
            name: "ratios",
            reason: "at least one ratio is required".into(),
        });
    }
    let members: Vec<(f64, SystemParams)> = ratios
        .iter()
        .map(|&r| params_for_ratio(base, pulse, r).map(|p| (r, p)))
        .collect::<Result<_>>()?;
    let reference = members
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty");
    let kappa = Engine::new(reference.1, *pulse, *spec)?.calibrate_kappa(pair)?;
    members
        .into_iter()
        .map(|(ratio, params)| {
            let grid = Engine::new(params, *pulse, *spec)?.compute_grid(pair, axis, axis, Some(kappa))?;
            let trace = grid.diagonal().expect("square grid");
            Ok(RatioPoint {
                ratio,
                params,
                grid,
                trace,
            })
        })
        .collect()
}

/// Correlation map over `(φ0, t1 − t2)` along the cut `t1 + t2 = cut_sum`.
#[derive(Debug, Clone)]
pub struct PhaseMap {
    pub phi_axis: Vec<f64>,
    pub dt_axis: Vec<f64>,
    /// Row-major, `φ0` is the slow index.
    pub c2: Vec<f64>,
    /// `C²(t, t)` at `t = cut_sum/2` for each φ0.
    pub diagonal: Vec<f64>,
    pub cut_sum: f64,
    pub kappa: Kappa,
    /// Parameters at φ0 = 0 (couplings shared by the whole sweep).
    pub reference: SystemParams,
}

impl PhaseMap {
    pub fn c2_at(&self, i: usize, j: usize) -> f64 {
        self.c2[i * self.dt_axis.len() + j]
    }
}

/// Phase sweep with couplings fixed by `δ_t/τ_life = ratio_at_zero` at
/// φ0 = 0 and the detuning kept on resonance for every φ0.
///
/// κ is calibrated once at φ0 = 0; near φ0 = π the lifetime diverges and the
/// probe amplitudes at twenty lifetimes are unresolvable.
pub fn phase_sweep(
    base: &SystemParams,
    pulse: &GaussianPulse,
    ratio_at_zero: f64,
    phi_axis: &[f64],
    cut_sum: f64,
    dt_axis: &[f64],
    pair: ChannelPair,
    spec: &QuadSpec,
) -> Result<PhaseMap> {
    let reference = params_for_ratio(&base.with_phi0(0.0)?, pulse, ratio_at_zero)?;
    let kappa = Engine::new(reference, *pulse, *spec)?.calibrate_kappa(pair)?;
    let rows: Vec<Result<(Vec<f64>, f64)>> = phi_axis
        .iter()
        .map(|&phi| {
            let params = reference.with_phi0(phi)?.at_resonance();
            let engine = Engine::new(params, *pulse, *spec)?;
            let row = dt_axis
                .iter()
                .map(|&dt| {
                    let t1 = 0.5 * (cut_sum + dt);
                    let t2 = 0.5 * (cut_sum - dt);
                    engine.c2_normalized(pair, t1, t2, &kappa)
                })
                .collect::<Result<Vec<f64>>>()?;
            let t = 0.5 * cut_sum;
            let diag = engine.c2_normalized(pair, t, t, &kappa)?;
            Ok((row, diag))
        })
        .collect();
    let mut c2 = Vec::with_capacity(phi_axis.len() * dt_axis.len());
    let mut diagonal = Vec::with_capacity(phi_axis.len());
    for row in rows {
        let (row, diag) = row?;
        c2.extend(row);
        diagonal.push(diag);
    }
    Ok(PhaseMap {
        phi_axis: phi_axis.to_vec(),
        dt_axis: dt_axis.to_vec(),
        c2,
        diagonal,
        cut_sum,
        kappa,
        reference,
    })
}

/// Regime of a correlation value relative to a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Bunching,
    Antibunching,
    Coherent,
}

/// Ordered regimes along a trace. Runs with `|c2| <= threshold` count as
/// coherent plateaus, except where they only mark a sign change between
/// bunching and antibunching.
pub fn regime_sequence(values: &[f64], threshold: f64) -> Vec<Regime> {
    let mut runs: Vec<Regime> = Vec::new();
    for &v in values {
        let r = if v > threshold {
            Regime::Bunching
        } else if v < -threshold {
            Regime::Antibunching
        } else {
            Regime::Coherent
        };
        if runs.last() != Some(&r) {
            runs.push(r);
        }
    }
    let mut out: Vec<Regime> = Vec::new();
    for (i, &r) in runs.iter().enumerate() {
        if r == Regime::Coherent && i > 0 && i + 1 < runs.len() && runs[i - 1] != runs[i + 1] {
            continue;
        }
        if out.last() != Some(&r) {
            out.push(r);
        }
    }
    out
}

/// Convenience wrappers over a default-tolerance [`Engine`].
pub fn psi1(params: &SystemParams, pulse: &GaussianPulse, channel: Channel, t: f64) -> Result<Complex64> {
    Engine::new(*params, *pulse, QuadSpec::default())?.psi1(channel, t)
}

pub fn intensity(params: &SystemParams, pulse: &GaussianPulse, channel: Channel, t: f64) -> Result<f64> {
    Engine::new(*params, *pulse, QuadSpec::default())?.intensity(channel, t)
}

pub fn psi2(params: &SystemParams, pulse: &GaussianPulse, pair: ChannelPair, t1: f64, t2: f64) -> Result<Complex64> {
    Engine::new(*params, *pulse, QuadSpec::default())?.psi2(pair, t1, t2)
}

pub fn nonlinear_term(
    params: &SystemParams,
    pulse: &GaussianPulse,
    pair: ChannelPair,
    t: f64,
    dt: f64,
) -> Result<Complex64> {
    Engine::new(*params, *pulse, QuadSpec::default())?.nonlinear_term(pair, t, dt)
}

/// Fraction of the input photon flux transmitted, `∫ I_t(t) dt`, evaluated in
/// the frequency domain as `∫ |f(k)|² |t_r(k)|² dk`.
pub fn transmitted_fraction(params: &SystemParams, pulse: &GaussianPulse, spec: &QuadSpec) -> Result<f64> {
    let spec = spec.with_truncation(default_truncation(pulse, pole_offset(params)));
    integrate(
        |k| {
            let v = pulse.spectral_amplitude(k).norm_sqr() * crate::scattering::t_r(params, k).norm_sqr();
            Complex64::new(v, 0.0)
        },
        &spec,
    )
    .map(|r| r.value.re)
}
