use thiserror::Error;

pub type Result<T> = std::result::Result<T, LarError>;

#[derive(Debug, Clone, Error)]
pub enum LarError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },

    #[error("matrix is not symmetric (defect {defect:e} > {tol:e})")]
    NotSymmetric { defect: f64, tol: f64 },

    #[error("matrix is not skew-symmetric (defect {defect:e} > {tol:e})")]
    NotSkew { defect: f64, tol: f64 },

    #[error("matrix is singular (pivot {pivot:e} below {tol:e})")]
    Singular { pivot: f64, tol: f64 },

    #[error("QR iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("eigenvector matrix is ill-conditioned (condition {condition:e} > {limit:e})")]
    IllConditioned {
        condition: f64,
        limit: f64,
        decomposition: Box<crate::linalg::EigenDecomposition>,
    },

    #[error("result exceeds representable range")]
    Overflow,

    #[error("point is not in the interior of the simplex (min component {min:e} <= {eps:e})")]
    NotInterior { min: f64, eps: f64 },

    #[error("invalid lottery: {reason}")]
    InvalidLottery { reason: String },

    #[error("tangent vector does not sum to zero (sum {sum:e})")]
    NotTangent { sum: f64 },

    #[error("vector is zero")]
    ZeroVector,

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("path is not closed (endpoint gap {gap:e})")]
    NotClosed { gap: f64 },

    #[error("path needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("split-complex phase is off the unit hyperbola at index {index} (defect {defect:e})")]
    OffHyperbola { index: usize, defect: f64 },

    #[error("readout context is not orthogonal (defect {defect:e})")]
    NotOrthogonal { defect: f64 },

    #[error("top eigenvalue is degenerate (gap {gap:e} <= {tol:e})")]
    DegenerateTopEigenvalue { gap: f64, tol: f64 },

    #[error("initial state is orthogonal to the dominant eigenvector (overlap {overlap:e})")]
    OrthogonalStart { overlap: f64 },

    #[error("grid needs at least {needed} points, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    #[error("time grid is not strictly increasing at index {index}")]
    InvalidGrid { index: usize },

    #[error("time {time} is not a grid point")]
    NotOnGrid { time: f64 },

    #[error("polarization is not in the normalized class M = R - iI")]
    NotNormalized,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl LarError {
    /// Stable short identifier, used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            LarError::NotSquare { .. } => "not-square",
            LarError::DimensionMismatch { .. } => "dimension-mismatch",
            LarError::NonFinite { .. } => "non-finite",
            LarError::NotSymmetric { .. } => "not-symmetric",
            LarError::NotSkew { .. } => "not-skew",
            LarError::Singular { .. } => "singular",
            LarError::NoConvergence { .. } => "no-convergence",
            LarError::IllConditioned { .. } => "ill-conditioned",
            LarError::Overflow => "overflow",
            LarError::NotInterior { .. } => "not-interior",
            LarError::InvalidLottery { .. } => "invalid-lottery",
            LarError::NotTangent { .. } => "not-tangent",
            LarError::ZeroVector => "zero-vector",
            LarError::NotUnit { .. } => "not-unit",
            LarError::NotClosed { .. } => "not-closed",
            LarError::TooFewSamples { .. } => "too-few-samples",
            LarError::OffHyperbola { .. } => "off-hyperbola",
            LarError::NotOrthogonal { .. } => "not-orthogonal",
            LarError::DegenerateTopEigenvalue { .. } => "degenerate-top-eigenvalue",
            LarError::OrthogonalStart { .. } => "orthogonal-start",
            LarError::GridTooCoarse { .. } => "grid-too-coarse",
            LarError::InvalidGrid { .. } => "invalid-grid",
            LarError::NotOnGrid { .. } => "not-on-grid",
            LarError::NotNormalized => "not-normalized",
            LarError::InvalidArgument(_) => "invalid-argument",
        }
    }
}
