//! Weak coherent Gaussian drive.
//!
//! `width` is the standard deviation of the temporal amplitude envelope, so
//! the spectral amplitude is `f(k) = (δ²/π)^{1/4} exp(-k²δ²/2) exp(i k t_c)`
//! and the temporal profile is `(πδ²)^{-1/4} exp(-(t-t_c)²/(2δ²))`. Both are
//! unit-normalized. Frequencies are offsets from the carrier.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    width: f64,
    center_time: f64,
    alpha: f64,
}

impl GaussianPulse {
    pub fn new(width: f64, center_time: f64, alpha: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "width",
                reason: format!("pulse width {width} must be positive and finite"),
            });
        }
        if !center_time.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center_time",
                reason: format!("{center_time} is not finite"),
            });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("{alpha} is not finite"),
            });
        }
        Ok(Self {
            width,
            center_time,
            alpha,
        })
    }

    /// Unit-width pulse centered at zero.
    pub fn unit() -> Self {
        Self {
            width: 1.0,
            center_time: 0.0,
            alpha: 0.1,
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center_time(&self) -> f64 {
        self.center_time
    }

    /// Coherent amplitude. Normalized correlations do not depend on it.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spectral_amplitude(&self, k: f64) -> Complex64 {
        let norm = (self.width * self.width / PI).powf(0.25);
        let envelope = norm * (-0.5 * k * k * self.width * self.width).exp();
        Complex64::from_polar(envelope, k * self.center_time)
    }

    pub fn temporal_profile(&self, t: f64) -> Complex64 {
        let x = (t - self.center_time) / self.width;
        let norm = (PI * self.width * self.width).powf(-0.25);
        Complex64::new(norm * (-0.5 * x * x).exp(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadSpec};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn peak_values() {
        let p = GaussianPulse::unit();
        let peak = (1.0 / PI).powf(0.25);
        assert!((p.spectral_amplitude(0.0).re - 0.751_125_5).abs() < 1e-7);
        assert!((p.spectral_amplitude(0.0).re - peak).abs() < 1e-15);
        assert!((p.temporal_profile(0.0).re - peak).abs() < 1e-15);
        assert!(p.spectral_amplitude(60.0).norm() < 1e-300);
        let p = GaussianPulse::new(2.0, 1.0, 0.1).unwrap();
        let ratio = p.temporal_profile(3.0).re / p.temporal_profile(1.0).re;
        assert!((ratio - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn spectrum_is_hermitian_when_centered() {
        let p = GaussianPulse::new(1.7, 0.0, 0.1).unwrap();
        for k in [-3.0, -0.2, 0.5, 4.0] {
            assert_eq!(p.spectral_amplitude(-k), p.spectral_amplitude(k).conj());
        }
    }

    #[test]
    fn rejects_non_positive_width() {
        assert!(GaussianPulse::new(0.0, 0.0, 0.1).is_err());
        assert!(GaussianPulse::new(-1.0, 0.0, 0.1).is_err());
        assert!(GaussianPulse::new(1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn parseval() {
        for (w, c) in [(1.0, 0.0), (0.3, 1.0), (2.5, -4.0)] {
            let p = GaussianPulse::new(w, c, 0.1).unwrap();
            let spec = QuadSpec::default().with_truncation(12.0 / w);
            let freq = integrate(|k| p.spectral_amplitude(k).norm_sqr().into(), &spec).unwrap();
            let spec = QuadSpec::default().with_truncation(c.abs() + 12.0 * w);
            let time = integrate(|t| p.temporal_profile(t).norm_sqr().into(), &spec).unwrap();
            assert!((freq.value.re - 1.0).abs() < 1e-10, "{freq:?}");
            assert!((time.value.re - 1.0).abs() < 1e-10, "{time:?}");
        }
    }

    #[test]
    fn profile_is_inverse_transform_of_spectrum() {
        let p = GaussianPulse::new(1.3, 0.4, 0.1).unwrap();
        let spec = QuadSpec::default().with_truncation(12.0 / p.width()).with_abs_tol(1e-13);
        let inv_sqrt_2pi = FRAC_1_SQRT_2 / PI.sqrt();
        for i in 0..50 {
            let t = -5.0 + 10.0 * i as f64 / 49.0;
            let num = integrate(
                |k| p.spectral_amplitude(k) * Complex64::from_polar(1.0, -k * t),
                &spec,
            )
            .unwrap()
            .value
                * inv_sqrt_2pi;
            assert!((num - p.temporal_profile(t)).norm() < 1e-10, "t={t}: {num}");
        }
    }
}
