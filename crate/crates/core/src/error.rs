use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("total decay rate {0} is negative (unphysical gain)")]
    NegativeDecay(f64),

    #[error("total decay rate vanishes: the atom is decoupled and its lifetime is infinite")]
    InfiniteLifetime,

    #[error("effective right-going coupling g1 + g2 e^(i phi0) vanishes; nonlinear channel coefficients are singular")]
    DecoupledPoint,

    #[error(
        "quadrature did not converge: estimate {estimate_re:+.6e}{estimate_im:+.6e}i, \
         error {achieved:.3e} > target {target:.3e} after {subdivisions} subdivisions"
    )]
    NonConvergence {
        estimate_re: f64,
        estimate_im: f64,
        achieved: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("all kappa probes are degenerate (single-photon amplitudes below {threshold:e})")]
    DegenerateProbe { threshold: f64 },

    #[error("{masked} of {total} grid points failed to integrate")]
    GridFailure { masked: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
