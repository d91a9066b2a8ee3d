//! Two-photon scattering for two right-incident photons.
//!
//! A kernel is kept in decomposed form: two elastic terms living on the
//! delta supports `p1=k1, p2=k2` and `p1=k2, p2=k1`, plus the smooth weight
//! multiplying `δ(k1 + k2 - p1 - p2)`. Delta distributions are never sampled.
//!
//! Notation used below, with `φ = φ0`:
//! `a = g1* + g2* e^{iφ}`, `b = g1* + g2* e^{-iφ}`, `c = g1 + g2 e^{iφ}`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{SystemParams, ZERO_REL};
use crate::scattering::{pole_offset, r_r, reflection_residue, s_r, t_r, Channel};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Output directions of the two detected photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelPair {
    pub first: Channel,
    pub second: Channel,
}

impl ChannelPair {
    pub const TT: Self = Self::new(Channel::Transmit, Channel::Transmit);
    pub const RR: Self = Self::new(Channel::Reflect, Channel::Reflect);
    pub const TR: Self = Self::new(Channel::Transmit, Channel::Reflect);
    pub const RT: Self = Self::new(Channel::Reflect, Channel::Transmit);

    pub const fn new(first: Channel, second: Channel) -> Self {
        Self { first, second }
    }

    /// True for (T,T) and (R,R), whose correlations are exchange symmetric.
    pub fn is_symmetric(self) -> bool {
        self.first == self.second
    }
}

impl fmt::Display for ChannelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first.label(), self.second.label())
    }
}

impl FromStr for ChannelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tt" => Ok(Self::TT),
            "rr" => Ok(Self::RR),
            "tr" => Ok(Self::TR),
            "rt" => Ok(Self::RT),
            other => Err(Error::InvalidParameter {
                name: "channel_pair",
                reason: format!("`{other}` is not one of tt, rr, tr, rt"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearConstants {
    /// Pole offset: `r_r(ω) = D/(ω + C)`.
    pub c: Complex64,
    pub d: Complex64,
    /// Both photons transmitted.
    pub b_tt: Complex64,
    /// Both photons reflected.
    pub b_rr: Complex64,
    /// One transmitted, one reflected.
    pub b_tr: Complex64,
}

impl NonlinearConstants {
    pub fn coefficient(&self, pair: ChannelPair) -> Complex64 {
        match (pair.first, pair.second) {
            (Channel::Transmit, Channel::Transmit) => self.b_tt,
            (Channel::Reflect, Channel::Reflect) => self.b_rr,
            _ => self.b_tr,
        }
    }
}

fn couplings(params: &SystemParams) -> (Complex64, Complex64, Complex64) {
    let a = params.left_coupling().conj();
    let b = params.right_coupling().conj();
    let c = params.right_coupling();
    (a, b, c)
}

/// Pole constants and channel coefficients of the bound-state term.
///
/// The coefficients carry `1/(a³ c)` and are singular where either effective
/// coupling vanishes; that case is reported as [`Error::DecoupledPoint`].
pub fn nonlinear_constants(params: &SystemParams) -> Result<NonlinearConstants> {
    let (a, b, c) = couplings(params);
    let scale = ZERO_REL * (params.g1().norm() + params.g2().norm());
    if c.norm() <= scale || a.norm() <= scale {
        return Err(Error::DecoupledPoint);
    }
    let pref = 1.0 / (2.0 * PI * PI);
    let a3c = a * a * a * c;
    Ok(NonlinearConstants {
        c: pole_offset(params),
        d: reflection_residue(params),
        b_tt: pref * b * b / a3c,
        b_rr: pref * a * a / a3c,
        b_tr: pref * a * b / a3c,
    })
}

/// `D³·B_c` for `pair`, written without the `1/a` factors so that it stays
/// finite everywhere and vanishes at the decoupled point.
pub fn pair_strength(params: &SystemParams, pair: ChannelPair) -> Complex64 {
    if params.is_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    let (a, b, c) = couplings(params);
    let tail = match (pair.first, pair.second) {
        (Channel::Transmit, Channel::Transmit) => b * b,
        (Channel::Reflect, Channel::Reflect) => a * a,
        _ => a * b,
    };
    4.0 * PI * I * c * c * tail
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// `δ(p1 - k1) δ(p2 - k2)`
    Direct,
    /// `δ(p1 - k2) δ(p2 - k1)`
    Exchanged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticTerm {
    pub support: Support,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonKernel {
    pub elastic: [ElasticTerm; 2],
    /// Smooth weight of `δ(k1 + k2 - p1 - p2)`.
    pub interaction: Complex64,
}

/// Raw interaction weight `i√(2π)/π · pre · s(p2)s(p1)[s(k1)+s(k2)] · num/c`.
fn interaction(
    params: &SystemParams,
    pre: Complex64,
    num: Complex64,
    p1: f64,
    p2: f64,
    k1: f64,
    k2: f64,
) -> Complex64 {
    if params.is_decoupled() {
        return Complex64::new(0.0, 0.0);
    }
    let c = params.right_coupling();
    let s = |k| s_r(params, k);
    I * TAU.sqrt() / PI * pre * s(p2) * s(p1) * (s(k1) + s(k2)) * num / c
}

fn kernel(
    elastic: (Complex64, Complex64),
    interaction: Complex64,
) -> TwoPhotonKernel {
    TwoPhotonKernel {
        elastic: [
            ElasticTerm {
                support: Support::Direct,
                amplitude: elastic.0,
            },
            ElasticTerm {
                support: Support::Exchanged,
                amplitude: elastic.1,
            },
        ],
        interaction,
    }
}

/// Both photons transmitted.
pub fn smatrix2_tt(params: &SystemParams, p1: f64, p2: f64, k1: f64, k2: f64) -> TwoPhotonKernel {
    let (_, b, _) = couplings(params);
    let t = |k| t_r(params, k);
    kernel(
        (t(k1) * t(k2), t(k2) * t(k1)),
        interaction(params, b, b, p1, p2, k1, k2),
    )
}

/// Both photons reflected.
pub fn smatrix2_rr(params: &SystemParams, p1: f64, p2: f64, k1: f64, k2: f64) -> TwoPhotonKernel {
    let (a, _, _) = couplings(params);
    let r = |k| r_r(params, k);
    kernel(
        (r(k1) * r(k2), r(k2) * r(k1)),
        interaction(params, a, a, p1, p2, k1, k2),
    )
}

/// Photon at `p1` transmitted, photon at `p2` reflected.
pub fn smatrix2_tr(params: &SystemParams, p1: f64, p2: f64, k1: f64, k2: f64) -> TwoPhotonKernel {
    let (a, b, _) = couplings(params);
    let t = |k| t_r(params, k);
    let r = |k| r_r(params, k);
    kernel(
        (t(k1) * r(k2), t(k2) * r(k1)),
        interaction(params, a, b, p1, p2, k1, k2),
    )
}

/// Kernel for an arbitrary ordered channel pair; (R,T) is (T,R) with the
/// outgoing frequencies exchanged.
pub fn smatrix2(
    params: &SystemParams,
    pair: ChannelPair,
    p1: f64,
    p2: f64,
    k1: f64,
    k2: f64,
) -> TwoPhotonKernel {
    match (pair.first, pair.second) {
        (Channel::Transmit, Channel::Transmit) => smatrix2_tt(params, p1, p2, k1, k2),
        (Channel::Reflect, Channel::Reflect) => smatrix2_rr(params, p1, p2, k1, k2),
        (Channel::Transmit, Channel::Reflect) => smatrix2_tr(params, p1, p2, k1, k2),
        (Channel::Reflect, Channel::Transmit) => {
            let swapped = smatrix2_tr(params, p2, p1, k1, k2);
            kernel(
                (swapped.elastic[1].amplitude, swapped.elastic[0].amplitude),
                swapped.interaction,
            )
        }
    }
}
