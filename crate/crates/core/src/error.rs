use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divergent parameter: {0}")]
    DivergentParameter(String),
    #[error("argument within pole threshold: {0}")]
    PoleHit(String),
    #[error("quadrature did not reach tolerance: {0}")]
    QuadratureFailure(String),
    #[error("truncation depth {needed} exceeds max_terms {max_terms}")]
    TruncationExceeded { needed: usize, max_terms: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown group: {0}")]
    UnknownGroup(String),
    #[error("gauge group has rank zero")]
    RankZero,
    #[error("unknown representation: {0}")]
    UnknownRepresentation(String),
    #[error("R-charge of chiral {index} leaves (0, 2): {value}")]
    ChargeWindowViolation { index: usize, value: String },
    #[error("missing flavor data: {0}")]
    MissingFlavorData(String),
    #[error("flavor anomaly does not cancel at ({l}, {m})")]
    FlavorAnomalyViolation { l: usize, m: usize },
    #[error("theory is chiral: {0}")]
    ChiralTheory(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("coordinate outside [-1/2, 1/2]: {0}")]
    DomainViolation(f64),
    #[error("rank {rank} exceeds limit {limit}")]
    RankTooLarge { rank: usize, limit: usize },
    #[error("R-charges are not rational; use grid mode")]
    IrrationalCharges,
    #[error("integrand does not decay: {0}")]
    TailBoundViolated(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
