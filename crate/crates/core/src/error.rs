use thiserror::Error;

/// Everything that can go wrong while evaluating the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cavity damping rate kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("coherence decay rate gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("drive amplitude omega must be non-negative, got {0}")]
    NegativeOmega(f64),
    #[error("phase-fluctuation deviation theta must be non-negative, got {0}")]
    NegativeTheta(f64),
    #[error("linear gain coefficient A must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("parameter {0} is not finite")]
    NonFinite(&'static str),
    #[error("unstable spectrum: Re(mu+) = {re_plus}, Re(mu-) = {re_minus}")]
    UnstableSystem { re_plus: f64, re_minus: f64 },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("determinant routes disagree: {route_a} vs {route_b}")]
    InconsistentMoments { route_a: f64, route_b: f64 },
    #[error("negative radicand {0} in the symplectic eigenvalue")]
    UnphysicalCovariance(f64),
    #[error("symplectic eigenvalue must be positive, got {0}")]
    NonPositiveEigenvalue(f64),
    #[error("step {dt} exceeds the stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("unknown preset `{0}` (expected fig1..fig10)")]
    UnknownPreset(String),
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
