//! Single-photon scattering amplitudes for right- and left-incident photons.
//!
//! All amplitudes share the denominator
//! `k + C`, `C = -Δ + 2πi(|g1|²+|g2|²) + 4πi Re(g1 g2*) e^{iφ0}`.
//! When the relevant effective coupling vanishes the exact limits
//! (transmission 1, reflection and excitation 0) are returned instead of
//! evaluating a 0/0 quotient.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Transmit,
    Reflect,
}

impl Channel {
    pub fn label(self) -> char {
        match self {
            Channel::Transmit => 't',
            Channel::Reflect => 'r',
        }
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Pole offset `C`; every amplitude has the form `(…)/(k + C)`.
pub fn pole_offset(params: &SystemParams) -> Complex64 {
    Complex64::new(-params.delta(), params.bare_decay())
        + I * (4.0 * PI * params.cross()) * params.phase()
}

/// Reflection residue `D`, so that `r_r(k) = D/(k + C)`.
pub fn reflection_residue(params: &SystemParams) -> Complex64 {
    if params.is_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    -TAU * I * reflection_bracket(params, params.phase())
}

/// `|g1|² + |g2|² e^{2iθ} + 2 Re(g1 g2*) e^{iθ}` for `e^{iθ} = phase`.
fn reflection_bracket(params: &SystemParams, phase: Complex64) -> Complex64 {
    params.g1().norm_sqr() + params.g2().norm_sqr() * phase * phase + 2.0 * params.cross() * phase
}

fn denominator(params: &SystemParams, k: f64) -> Complex64 {
    k + pole_offset(params)
}

/// Atomic excitation amplitude for a right-incident photon.
pub fn s_r(params: &SystemParams, k: f64) -> Complex64 {
    if params.is_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    TAU.sqrt() * params.right_coupling() / denominator(params, k)
}

/// Atomic excitation amplitude for a left-incident photon.
pub fn s_l(params: &SystemParams, k: f64) -> Complex64 {
    if params.is_left_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    TAU.sqrt() * params.left_coupling() / denominator(params, k)
}

pub fn t_r(params: &SystemParams, k: f64) -> Complex64 {
    if params.is_decoupled() {
        return Complex64::new(1.0, 0.0);
    }
    let z = params.g1() * params.g2().conj();
    (k - params.delta() - 4.0 * PI * z * params.phi0().sin()) / denominator(params, k)
}

pub fn r_r(params: &SystemParams, k: f64) -> Complex64 {
    if params.is_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    reflection_residue(params) / denominator(params, k)
}

pub fn t_l(params: &SystemParams, k: f64) -> Complex64 {
    if params.is_left_decoupled() {
        return Complex64::new(1.0, 0.0);
    }
    let z = params.g1().conj() * params.g2();
    (k - params.delta() - 4.0 * PI * z * params.phi0().sin()) / denominator(params, k)
}

pub fn r_l(params: &SystemParams, k: f64) -> Complex64 {
    if params.is_left_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    -TAU * I * reflection_bracket(params, params.phase().conj()) / denominator(params, k)
}

/// Output amplitude of a right-incident photon into `channel`.
pub fn chi(params: &SystemParams, channel: Channel, k: f64) -> Complex64 {
    match channel {
        Channel::Transmit => t_r(params, k),
        Channel::Reflect => r_r(params, k),
    }
}
