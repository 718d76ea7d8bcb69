use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration failed after s = {last_good}: {reason}")]
    IntegrationFailure { last_good: f64, reason: String },
    #[error("conjugate point: metric factor vanishes at s = {0}")]
    ConjugatePoint(f64),
    #[error("invalid surface: radius vanishes at s = {0}")]
    InvalidSurface(f64),
    #[error("pole singularity: radius is zero at the evaluation point")]
    PoleSingularity,
    #[error("no limit: {0}")]
    NoLimit(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("capability: {0}")]
    Capability(String),
    #[error("degenerate pairing: |pairing| = {0:e}")]
    DegeneratePairing(f64),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

impl Error {
    /// True for failures caused by an input that violates a geometric hypothesis.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, Error::HypothesisViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
