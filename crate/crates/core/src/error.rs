use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kappa must lie in (0, 8), got {0}")]
    InvalidKappa(f64),

    #[error("point {0} is outside the domain: {1}")]
    OutsideDomain(String, &'static str),

    #[error("singular point: {0}")]
    Singular(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point absorbed by the hull at t = {t}")]
    Swallowed { t: f64 },

    #[error("step budget of {steps} exhausted at t = {t} (|Z| = {modulus})")]
    StepBudget { steps: u64, t: f64, modulus: f64 },

    #[error("discretization fault: {0}")]
    Discretization(String),

    #[error("effective sample size {ess:.1} below {min:.1} (n = {n})")]
    LowEffectiveSampleSize { ess: f64, min: f64, n: usize },

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
