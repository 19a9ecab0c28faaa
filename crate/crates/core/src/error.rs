use thiserror::Error;

/// Errors produced by flock construction, spectral analysis and simulation.
#[derive(Debug, Error)]
pub enum FlockError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("agent index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("operation requires {expected} boundary")]
    WrongBoundary { expected: &'static str },

    #[error("system of size N = {n} exceeds the dense cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("root finding failed for mode m = {mode}: {reason}")]
    RootFinding { mode: usize, reason: String },

    #[error("eigensolver did not converge")]
    Eigensolver,

    #[error("{value} is not a root: residual {residual:e}")]
    NotARoot { value: String, residual: f64 },

    #[error("locus tracking lost at phi = {last_good_phi}: {reason}")]
    LocusTracking { last_good_phi: f64, reason: String },

    #[error("expansion requires {0}")]
    ExpansionDomain(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("too few peaks: found {found}, need {needed}")]
    TooFewPeaks { found: usize, needed: usize },

    #[error("interpolation failed: {0}")]
    Interpolation(String),
}

pub type Result<T> = std::result::Result<T, FlockError>;
