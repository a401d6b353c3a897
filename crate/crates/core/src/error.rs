use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigenvalue gap {gap:.3e} below the hyperbolicity floor at {state:?}")]
    NonHyperbolic { gap: f64, state: Vec<f64> },
    #[error("state {state:?} lies outside the admissible domain")]
    OutOfDomain { state: Vec<f64> },
    #[error("model `{0}` has no conservative flux")]
    NotConservative(String),
    #[error("invalid wave code: {0}")]
    InvalidCode(String),
    #[error("supports of families {0} and {1} overlap")]
    OverlappingSupports(usize, usize),
    #[error("time {t} exceeds the simple-wave horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("blowup detected at t = {t}: Q = {q:.6e} exceeds 4 Q(0) = {limit:.6e}")]
    BlowupDetected { t: f64, q: f64, limit: f64 },
    #[error("construction breach: {0}")]
    ConstructionBreach(String),
    #[error("no convergence after {sweeps} sweeps (last update {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("CFL violation: {0}")]
    CflViolation(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Hoeffding bound inapplicable: mu = {mu} is not positive")]
    HoeffdingInapplicable { mu: f64 },
    #[error("epsilon too large: {0}")]
    EpsilonTooLarge(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), message: err.to_string() }
    }
}
