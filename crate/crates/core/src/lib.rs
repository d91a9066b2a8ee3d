//! Photon scattering off a two-level giant atom coupled to a bidirectional
//! waveguide at two points, driven by a weak coherent Gaussian pulse.
//!
//! The crate evaluates closed-form one- and two-photon scattering amplitudes,
//! builds the output wavefunctions by adaptive quadrature, and reports
//! second-order correlation functions on time grids. The [`oracle`] module
//! re-derives each analytic shortcut along an independent numerical path.

pub mod correlations;
pub mod error;
pub mod oracle;
pub mod params;
pub mod pulse;
pub mod quadrature;
pub mod scattering;
pub mod twophoton;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use params::{lifetime, resonant_detuning, total_decay, SystemParams, UnitSystem};
pub use pulse::GaussianPulse;
pub use quadrature::{QuadResult, QuadSpec};
pub use scattering::Channel;
pub use twophoton::{ChannelPair, NonlinearConstants};
