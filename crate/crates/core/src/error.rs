use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("collision: separation {distance:e} is below the guard {threshold:e}")]
    Collision { distance: f64, threshold: f64 },

    #[error("singular sector: |sum(z_m - z_0)| = {magnitude:e} is below {threshold:e}")]
    SingularSector { magnitude: f64, threshold: f64 },

    #[error("outside the slice chart: {0}")]
    Chart(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("non-finite sample in a finite-difference stencil")]
    NonFiniteSample,

    #[error("step limit of {steps} reached at t = {t}")]
    StepLimit { t: f64, steps: usize },

    #[error("event function does not change sign over the span")]
    NoSignChange,

    #[error("hyperbolic regime: 36u^2 = {lhs} exceeds alpha^2 = {rhs}")]
    Hyperbolic { lhs: f64, rhs: f64 },

    #[error("function {index} is not holomorphic (|d/dzbar| = {residual:e})")]
    NotHolomorphic { index: usize, residual: f64 },

    #[error("function is not real-valued (|Im| = {imag:e})")]
    NotReal { imag: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
