use thiserror::Error;

/// Errors raised by the numeric layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("log-smoothness rho = {rho} is below log-concavity nu = {nu}")]
    SmoothnessBelowConcavity { rho: f64, nu: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}] at depth {depth}")]
    Quadrature { a: f64, b: f64, depth: u32 },

    #[error("envelope construction failed: {0}")]
    Envelope(String),

    #[error("rejection sampler exhausted {proposals} proposals for sample {index}")]
    Rejection { index: usize, proposals: u64 },

    #[error("log-density is not concave at x = {at}: second derivative {value}")]
    NonConcave { at: f64, value: f64 },

    #[error("degenerate projected step at iteration {step}: zero vector")]
    DegenerateStep { step: usize },

    #[error("non-finite {what} at iteration {step}")]
    NonFinite { what: &'static str, step: usize },

    #[error("confidence threshold dropped every sample in round {round}")]
    AllSamplesDropped { round: usize },

    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
