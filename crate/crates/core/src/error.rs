use thiserror::Error;

/// Errors produced by the simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("photon number not conserved: {input} photons in, {output} photons out")]
    NotConserved { input: u64, output: u64 },

    #[error("no coincident output state exists for odd total photon number {0}")]
    NoCoincidentOutput(u64),

    #[error("required cutoff {required} exceeds the ceiling {ceiling}")]
    CutoffExceeded { required: usize, ceiling: usize },

    #[error("tail mass {tail:e} exceeds the tolerance {tolerance:e}")]
    TailTooLarge { tail: f64, tolerance: f64 },

    #[error("quadrature did not converge: value {value}, error estimate {estimate:e} above target {target:e}")]
    QuadratureNotConverged { value: f64, estimate: f64, target: f64 },

    #[error("series did not converge after {terms} orders: remainder bound {bound:e}")]
    SeriesNotConverged { terms: usize, bound: f64 },

    #[error("evaluation routes disagree: {first} vs {second} (allowed {allowed:e})")]
    RoutesDisagree { first: f64, second: f64, allowed: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
