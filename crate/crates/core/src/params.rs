//! Physical parameters of the two-point giant atom and the derived rates.
//!
//! Couplings are stored as complex amplitudes `g` in units of
//! sqrt(angular frequency), so that `2π|g|²` is the decay rate through one
//! coupling point. The library is unit-agnostic; [`UnitSystem`] handles the
//! conversion between laboratory units (ns, MHz) and the internal units used
//! by the command line tool.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which a rate or a coupling combination is
/// treated as exactly zero.
pub(crate) const ZERO_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    g1: Complex64,
    g2: Complex64,
    phi0: f64,
    delta: f64,
}

impl SystemParams {
    /// Builds a parameter set. `phi0` is given in raw radians and wrapped
    /// into `[0, 2π)`.
    pub fn new(g1: Complex64, g2: Complex64, phi0: f64, delta: f64) -> Result<Self> {
        for (name, g) in [("g1", g1), ("g2", g2)] {
            if !(g.re.is_finite() && g.im.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("coupling {g} is not finite"),
                });
            }
        }
        if g1.norm_sqr() == 0.0 && g2.norm_sqr() == 0.0 {
            return Err(Error::InvalidParameter {
                name: "g1, g2",
                reason: "at least one coupling must be nonzero".into(),
            });
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi0",
                reason: format!("{phi0} is not finite"),
            });
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("{delta} is not finite"),
            });
        }
        let params = Self {
            g1,
            g2,
            phi0: wrap_phase(phi0),
            delta,
        };
        let gamma = params.raw_total_decay();
        if gamma < -ZERO_REL * params.bare_decay() {
            return Err(Error::NegativeDecay(gamma));
        }
        Ok(params)
    }

    /// Real, equal couplings `g` at both points.
    pub fn symmetric(g: f64, phi0: f64, delta: f64) -> Result<Self> {
        Self::new(Complex64::new(g, 0.0), Complex64::new(g, 0.0), phi0, delta)
    }

    /// Couplings from per-point decay rates `Γ_j = 2π|g_j|²` and coupling phases.
    pub fn from_decay_rates(
        gamma1: f64,
        gamma2: f64,
        theta1: f64,
        theta2: f64,
        phi0: f64,
        delta: f64,
    ) -> Result<Self> {
        for (name, gamma) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(gamma >= 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("decay rate {gamma} must be finite and non-negative"),
                });
            }
        }
        let g1 = Complex64::from_polar((gamma1 / TAU).sqrt(), theta1);
        let g2 = Complex64::from_polar((gamma2 / TAU).sqrt(), theta2);
        Self::new(g1, g2, phi0, delta)
    }

    pub fn g1(&self) -> Complex64 {
        self.g1
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.g1, self.g2, self.phi0, delta)
    }

    pub fn with_phi0(self, phi0: f64) -> Result<Self> {
        Self::new(self.g1, self.g2, phi0, self.delta)
    }

    /// Same parameters with the detuning set to [`resonant_detuning`].
    pub fn at_resonance(self) -> Self {
        Self {
            delta: resonant_detuning(&self),
            ..self
        }
    }

    /// Multiplies both couplings by `factor`, which scales every rate by `factor²`.
    pub fn scale_couplings(self, factor: f64) -> Result<Self> {
        Self::new(self.g1 * factor, self.g2 * factor, self.phi0, self.delta)
    }

    /// `2π(|g1|² + |g2|²)`, the decay rate without interference.
    pub fn bare_decay(&self) -> f64 {
        TAU * (self.g1.norm_sqr() + self.g2.norm_sqr())
    }

    /// `Re(g1 g2*)`.
    pub(crate) fn cross(&self) -> f64 {
        (self.g1 * self.g2.conj()).re
    }

    pub(crate) fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi0)
    }

    fn raw_total_decay(&self) -> f64 {
        self.bare_decay() + 4.0 * PI * self.cross() * self.phi0.cos()
    }

    /// Effective coupling seen by a right-going photon, `g1 + g2 e^{iφ0}`.
    pub fn right_coupling(&self) -> Complex64 {
        self.g1 + self.g2 * self.phase()
    }

    /// Effective coupling seen by a left-going photon, `g1 + g2 e^{-iφ0}`.
    pub fn left_coupling(&self) -> Complex64 {
        self.g1 + self.g2 * self.phase().conj()
    }

    /// True when the right-going effective coupling vanishes, so that a
    /// right-incident field passes the atom unchanged.
    pub fn is_decoupled(&self) -> bool {
        self.right_coupling().norm() <= ZERO_REL * (self.g1.norm() + self.g2.norm())
    }

    /// True when the left-going effective coupling vanishes.
    pub(crate) fn is_left_decoupled(&self) -> bool {
        self.left_coupling().norm() <= ZERO_REL * (self.g1.norm() + self.g2.norm())
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Total decay rate `Γ_tot = 2π(|g1|²+|g2|²) + 4π Re(g1 g2*) cos φ0`, the
/// imaginary part of the single-photon pole.
pub fn total_decay(params: &SystemParams) -> f64 {
    let gamma = params.raw_total_decay();
    if gamma.abs() <= ZERO_REL * params.bare_decay() {
        0.0
    } else {
        gamma
    }
}

/// Atomic lifetime `1/Γ_tot`.
pub fn lifetime(params: &SystemParams) -> Result<f64> {
    let gamma = total_decay(params);
    if gamma == 0.0 {
        Err(Error::InfiniteLifetime)
    } else {
        Ok(1.0 / gamma)
    }
}

/// Detuning that cancels the interference (Lamb) shift and places the dressed
/// resonance at zero frequency offset: `Δ = -4π Re(g1 g2*) sin φ0`.
pub fn resonant_detuning(params: &SystemParams) -> f64 {
    -4.0 * PI * params.cross() * params.phi0.sin()
}

/// Conversion between laboratory units and internal units.
///
/// One internal time unit equals `time_unit_ns` nanoseconds; rates are
/// expressed in the reciprocal unit. Laboratory rates in MHz are read as
/// `10⁶ s⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    time_unit_ns: f64,
}

impl UnitSystem {
    pub fn new(time_unit_ns: f64) -> Result<Self> {
        if !(time_unit_ns > 0.0 && time_unit_ns.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "time_unit",
                reason: format!("{time_unit_ns} ns must be positive and finite"),
            });
        }
        Ok(Self { time_unit_ns })
    }

    pub fn time_unit_ns(&self) -> f64 {
        self.time_unit_ns
    }

    /// Internal rate unit expressed in MHz.
    pub fn frequency_unit_mhz(&self) -> f64 {
        1e3 / self.time_unit_ns
    }

    pub fn time_from_ns(&self, ns: f64) -> f64 {
        ns / self.time_unit_ns
    }

    pub fn time_to_ns(&self, t: f64) -> f64 {
        t * self.time_unit_ns
    }

    pub fn rate_from_mhz(&self, mhz: f64) -> f64 {
        mhz / self.frequency_unit_mhz()
    }

    pub fn rate_to_mhz(&self, rate: f64) -> f64 {
        rate * self.frequency_unit_mhz()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn sym(g: f64, phi: f64) -> SystemParams {
        SystemParams::symmetric(g, phi, 0.0).unwrap()
    }

    #[test]
    fn total_decay_examples() {
        let g = 0.3;
        assert!((total_decay(&sym(g, FRAC_PI_2)) - 4.0 * PI * g * g).abs() < 1e-14);
        assert_eq!(total_decay(&sym(g, PI)), 0.0);
        assert!((total_decay(&sym(g, 0.0)) - 8.0 * PI * g * g).abs() < 1e-14);
    }

    #[test]
    fn lifetime_examples() {
        // 4πg² = 0.01 per ns
        let g = (0.01 / (4.0 * PI)).sqrt();
        let tau = lifetime(&sym(g, FRAC_PI_2)).unwrap();
        assert!((tau - 100.0).abs() < 1e-9);
        assert_eq!(lifetime(&sym(g, PI)), Err(Error::InfiniteLifetime));
        let single = SystemParams::new(Complex64::new(g, 0.0), Complex64::new(0.0, 0.0), 1.0, 0.0)
            .unwrap();
        assert!((lifetime(&single).unwrap() - 1.0 / (TAU * g * g)).abs() < 1e-9);
    }

    #[test]
    fn resonant_detuning_examples() {
        let g = 0.2;
        assert!((resonant_detuning(&sym(g, FRAC_PI_2)) + 4.0 * PI * g * g).abs() < 1e-14);
        let p = SystemParams::new(Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5), 0.0, 1.0)
            .unwrap();
        assert_eq!(resonant_detuning(&p), 0.0);
        assert!((resonant_detuning(&sym(g, 1.5 * PI)) - 4.0 * PI * g * g).abs() < 1e-14);
    }

    #[test]
    fn phase_wrapping() {
        assert!((sym(0.1, -FRAC_PI_2).phi0() - 1.5 * PI).abs() < 1e-14);
        assert!((sym(0.1, 5.0 * PI).phi0() - PI).abs() < 1e-12);
        assert_eq!(sym(0.1, TAU).phi0(), 0.0);
        assert_eq!(sym(0.1, -1e-300).phi0(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let z = Complex64::new(0.0, 0.0);
        assert!(SystemParams::new(z, z, 0.0, 0.0).is_err());
        assert!(SystemParams::new(Complex64::new(f64::NAN, 0.0), z, 0.0, 0.0).is_err());
        assert!(SystemParams::symmetric(0.1, f64::INFINITY, 0.0).is_err());
        assert!(SystemParams::from_decay_rates(-1.0, 1.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(UnitSystem::new(0.0).is_err());
    }

    #[test]
    fn decay_rate_constructor() {
        let p = SystemParams::from_decay_rates(5.0, 5.0, 0.0, 0.0, FRAC_PI_2, 0.0).unwrap();
        assert!((total_decay(&p) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn units_round_trip() {
        let u = UnitSystem::new(100.0).unwrap();
        assert!((u.frequency_unit_mhz() * u.time_unit_ns() - 1e3).abs() < 1e-12);
        // a 10 MHz rate is 0.01 per ns, i.e. 1 per 100 ns
        assert!((u.rate_from_mhz(10.0) - 1.0).abs() < 1e-12);
        assert!((u.time_to_ns(u.time_from_ns(250.0)) - 250.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn decay_is_cosine_even(g1 in 0.01f64..1.0, g2 in 0.01f64..1.0, phi in 0.0f64..TAU) {
                let a = SystemParams::new(g1.into(), g2.into(), phi, 0.0).unwrap();
                let b = SystemParams::new(g1.into(), g2.into(), TAU - phi, 0.0).unwrap();
                let scale = a.bare_decay();
                prop_assert!((total_decay(&a) - total_decay(&b)).abs() <= 1e-12 * scale);
                prop_assert!((resonant_detuning(&a) + resonant_detuning(&b)).abs() <= 1e-12 * scale);
                prop_assert!(total_decay(&a) >= 0.0);
            }

            #[test]
            fn decay_invariant_under_mirror_exchange(
                a1 in -1.0f64..1.0, b1 in -1.0f64..1.0,
                a2 in -1.0f64..1.0, b2 in -1.0f64..1.0,
                phi in 0.0f64..TAU,
            ) {
                let g1 = Complex64::new(a1, b1);
                let g2 = Complex64::new(a2, b2);
                prop_assume!(g1.norm() + g2.norm() > 1e-3);
                let a = SystemParams::new(g1, g2, phi, 0.0).unwrap();
                let b = SystemParams::new(g2, g1, phi, 0.0).unwrap();
                prop_assert!((total_decay(&a) - total_decay(&b)).abs() <= 1e-12 * a.bare_decay());
            }
        }
    }
}
