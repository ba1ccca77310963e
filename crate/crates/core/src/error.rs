use thiserror::Error;

/// Errors raised by the model builders and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid Casimir parameter {mu}: must be nonzero, and of the form -n^2+n (n >= 2) when negative")]
    InvalidCasimir { mu: f64 },

    #[error("truncation K = {trunc} is too small (need K >= 4)")]
    TruncationTooSmall { trunc: usize },

    #[error("negative Sobolev order {order} is not supported")]
    NegativeOrderUnsupported { order: f64 },

    #[error("{context}: expected length {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{norms} norms but {weights} weights")]
    LengthMismatch { norms: usize, weights: usize },

    #[error("kernel tolerance {tol} outside (1e-14, 1e-4)")]
    InvalidTolerance { tol: f64 },

    #[error("singular value {singular_value:.3e} lies within a decade of the kernel tolerance {tol:.1e}")]
    DegenerateTruncation { singular_value: f64, tol: f64 },

    #[error("distribution vectors are numerically dependent (Gram reciprocal condition {rcond:.3e})")]
    RankDeficient { rcond: f64 },

    #[error("distribution set has no dual functions")]
    MissingDuals,

    #[error("distribution set was built for a different representation or time step")]
    DistributionMismatch,

    #[error("invariant distribution {index} pairs to {pairing:.3e} with the right-hand side (bound {bound:.3e})")]
    AnnihilatorViolation {
        index: usize,
        pairing: f64,
        bound: f64,
    },

    #[error("least-squares residual {residual:.3e} exceeds {bound:.3e}")]
    IllConditioned { residual: f64, bound: f64 },

    #[error("cocycle defect {defect:.3e} exceeds {bound:.3e}")]
    CompatibilityViolation { defect: f64, bound: f64 },

    #[error("column {column}: invariant pairing {pairing:.3e} exceeds {bound:.3e}")]
    ColumnObstruction {
        column: usize,
        pairing: f64,
        bound: f64,
    },

    #[error("stage {stage} ({coordinate}) failed: {source}")]
    StageObstruction {
        factor: u8,
        stage: u8,
        coordinate: &'static str,
        #[source]
        source: Box<LabError>,
    },

    #[error("component weights must be positive and sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },

    #[error("Casimir parameter {mu} violates the spectral gap floor {gap}")]
    GapViolation { mu: f64, gap: f64 },
}

pub type Result<T> = std::result::Result<T, LabError>;
