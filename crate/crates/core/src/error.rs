use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty closed set")]
    EmptyClosedSet,
    #[error("space mismatch: {0} vs {1}")]
    SpaceMismatch(String, String),
    #[error("empty sequence")]
    EmptySequence,
    #[error("unresolved limit at tolerance {tol}")]
    UnresolvedLimit { tol: f64 },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("condition (*) violated at label {0:?}")]
    PartitionStarViolated(String),
    #[error("not saturated: sample meets class {0:?} without containing it")]
    NotSaturated(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field mismatch")]
    FieldMismatch,
    #[error("scaling factor must be nonzero")]
    ZeroScale,
    #[error("relation does not induce invertible operator")]
    SingularInducedOperator,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("chain dimensions inconsistent at link {0}")]
    ChainInconsistent(usize),
    #[error("scales not separated at probes")]
    ScalesNotSeparated,
    #[error("limit of component {component} not accepted: probe gap {gap:e} > {tol:e}")]
    LimitNotConverged { component: usize, gap: f64, tol: f64 },
    #[error("hinge validation failed: {0}")]
    InvalidHinge(String),
    #[error("sequence has multiple limit classes ({0})")]
    MultipleLimitClasses(usize),
    #[error("sample is not a hinge set: {0}")]
    NotAHingeSet(String),
    #[error("not a graph of an invertible operator")]
    NotInvertibleGraph,
    #[error("real field required")]
    RealFieldRequired,
    #[error("positive-definite hinge check failed at component {component}: {reason}")]
    NotPositiveDefinite { component: usize, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
