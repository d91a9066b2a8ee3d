//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Rates are in MHz, times in ns. Results come back as flat `Float64Array`s
//! of interleaved rows.

use std::f64::consts::PI;

use giant_atom::correlations::{linspace, phase_sweep, Engine};
use giant_atom::scattering::{r_r, t_r};
use giant_atom::{ChannelPair, GaussianPulse, QuadSpec, SystemParams, UnitSystem};
use wasm_bindgen::prelude::*;

fn system(
    units: &UnitSystem,
    gamma1_mhz: f64,
    gamma2_mhz: f64,
    phi0_over_pi: f64,
) -> Result<SystemParams, String> {
    SystemParams::from_decay_rates(
        units.rate_from_mhz(gamma1_mhz),
        units.rate_from_mhz(gamma2_mhz),
        0.0,
        0.0,
        phi0_over_pi * PI,
        0.0,
    )
    .map_err(|e| e.to_string())
}

/// Rows of `(k, |t|², |r|²)` with `k` in MHz relative to the bare atom, at
/// detuning `delta_mhz`.
pub fn spectrum_rows(
    gamma1_mhz: f64,
    gamma2_mhz: f64,
    phi0_over_pi: f64,
    delta_mhz: f64,
    span_mhz: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let units = UnitSystem::new(1000.0).map_err(|e| e.to_string())?;
    let p = system(&units, gamma1_mhz, gamma2_mhz, phi0_over_pi)?
        .with_delta(units.rate_from_mhz(delta_mhz))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * points);
    for k in linspace(-span_mhz, span_mhz, points.max(2)) {
        let kk = units.rate_from_mhz(k);
        out.extend([k, t_r(&p, kk).norm_sqr(), r_r(&p, kk).norm_sqr()]);
    }
    Ok(out)
}

/// Rows of `(t, c2(t,t), I(t)²)` for transmitted pairs at resonance;
/// `t` in ns, the rest in MHz².
pub fn trace_rows(
    gamma1_mhz: f64,
    gamma2_mhz: f64,
    phi0_over_pi: f64,
    width_ns: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let units = UnitSystem::new(width_ns).map_err(|e| e.to_string())?;
    let p = system(&units, gamma1_mhz, gamma2_mhz, phi0_over_pi)?.at_resonance();
    let pulse = GaussianPulse::unit();
    let engine = Engine::new(p, pulse, QuadSpec::default()).map_err(|e| e.to_string())?;
    let axis = linspace(-4.0, 6.0, points.max(2));
    let kappa = engine.calibrate_kappa(ChannelPair::TT).map_err(|e| e.to_string())?;
    let mhz2 = |x: f64| units.rate_to_mhz(units.rate_to_mhz(x));
    let mut out = Vec::with_capacity(3 * axis.len());
    for &t in &axis {
        let c2 = engine
            .c2_normalized(ChannelPair::TT, t, t, &kappa)
            .map_err(|e| e.to_string())?;
        let i = engine
            .intensity(giant_atom::Channel::Transmit, t)
            .map_err(|e| e.to_string())?;
        out.extend([units.time_to_ns(t), mhz2(c2), mhz2(i * i)]);
    }
    Ok(out)
}

/// Rows of `(φ0, c2)` on the equal-time point of the cut `t1 + t2 = cut`,
/// couplings scaled to width/lifetime = `ratio_at_zero` at φ0 = 0 and
/// resonance tracked at every phase. `c2` is in units of the pulse bandwidth
/// squared.
pub fn phase_rows(ratio_at_zero: f64, cut_widths: f64, points: usize) -> Result<Vec<f64>, String> {
    let base = SystemParams::symmetric(0.1, 0.0, 0.0).map_err(|e| e.to_string())?;
    let phis = linspace(0.0, 2.0 * PI, points.max(2));
    let map = phase_sweep(
        &base,
        &GaussianPulse::unit(),
        ratio_at_zero,
        &phis,
        cut_widths,
        &[0.0],
        ChannelPair::TT,
        &QuadSpec::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok(phis.iter().zip(&map.diagonal).flat_map(|(p, c)| [*p, *c]).collect())
}

#[wasm_bindgen]
pub fn spectrum(
    gamma1_mhz: f64,
    gamma2_mhz: f64,
    phi0_over_pi: f64,
    delta_mhz: f64,
    span_mhz: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    spectrum_rows(gamma1_mhz, gamma2_mhz, phi0_over_pi, delta_mhz, span_mhz, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn equal_time_trace(
    gamma1_mhz: f64,
    gamma2_mhz: f64,
    phi0_over_pi: f64,
    width_ns: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    trace_rows(gamma1_mhz, gamma2_mhz, phi0_over_pi, width_ns, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phase_diagonal(ratio_at_zero: f64, cut_widths: f64, points: usize) -> Result<Vec<f64>, JsError> {
    phase_rows(ratio_at_zero, cut_widths, points).map_err(|e| JsError::new(&e))
}
