use alloc::string::String;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),
    #[error("search cancelled")]
    Cancelled,
    #[error("base landmarks are not in general position")]
    SingularBase,
    #[error("landmarks do not form a frame")]
    NotAFrame,
    #[error("configuration does not contain the pseudo-frame: {0}")]
    PseudoFrameAbsent(String),
    #[error("malformed pseudo-frame: {0}")]
    InvalidPseudoFrame(String),
    #[error("configuration is not free")]
    NotFree,
    #[error("configuration is not splittable")]
    NotSplittable,
    #[error("subspace numbers do not satisfy the Hausdorff criterion")]
    NotHausdorffInput,
    #[error("invalid subspace numbers: {0}")]
    InvalidSubspaceNumbers(String),
    #[error("not standardizable: residual {residual:e} after {iterations} iterations")]
    NotStandardizable { residual: f64, iterations: usize },
    #[error("landmark {0} collapsed to zero during standardization")]
    ZeroRow(usize),
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("matrix is not Tyler standardized (column residual {0:e})")]
    NotStandardized(f64),
    #[error("invalid block pair: {0}")]
    InvalidBlockPair(String),
    #[error("infeasible constraint: {0}")]
    InfeasibleConstraint(String),
}

pub type Result<T> = core::result::Result<T, Error>;
