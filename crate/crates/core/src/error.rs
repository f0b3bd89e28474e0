use alloc::string::String;

use thiserror::Error;

/// Failures of the exact forest-algebra routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("degree {requested} exceeds the safety cap {cap}")]
    DegreeCap { requested: usize, cap: usize },
    #[error("alphabet must contain at least one label")]
    EmptyAlphabet,
    #[error("the reduced coproduct and the primitive projector are undefined on the empty forest")]
    EmptyForest,
    #[error("natural growth onto a series with an empty-forest term")]
    GrowthOntoEmpty,
    #[error("change-of-basis matrix in degree {degree} is singular")]
    SingularBasis { degree: usize },
    #[error("primitive basis in degree {degree} has {found} elements, expected {expected}")]
    BasisDimension {
        degree: usize,
        found: usize,
        expected: usize,
    },
    #[error("label {0:?} is not part of the alphabet")]
    UnknownLabel(char),
}

/// Parse failure of a forest or series literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

/// Failures of the grid-based analytic layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("alpha = {0} is not allowed: alpha must lie in (0,1) and avoid 1/n")]
    InvalidAlpha(f64),
    #[error("beta = {beta} must satisfy 0 < beta < alpha = {alpha}")]
    InvalidBeta { alpha: f64, beta: f64 },
    #[error("epsilon = {epsilon} must lie in (0, {bound})")]
    InvalidEpsilon { epsilon: f64, bound: f64 },
    #[error("grid times must be strictly increasing with at least two points")]
    InvalidGrid,
    #[error("path values do not match the grid: {0}")]
    ShapeMismatch(String),
    #[error("grids or degrees of the two objects differ")]
    GridMismatch,
    #[error("time {0} is not a grid point")]
    NotOnGrid(f64),
    #[error("forest {0} is outside the admissible index set")]
    ForestOutOfRange(String),
    #[error("empty interval")]
    EmptyInterval,
    #[error("endpoint mismatch of {gap:e} between glued pieces at t = {time}")]
    EndpointMismatch { time: f64, gap: f64 },
    #[error("pieces are not contiguous on the reference grid")]
    NotContiguous,
    #[error("insufficient scales for fit: need at least {needed}, got {got}")]
    InsufficientScales { needed: usize, got: usize },
    #[error("dissection point t = {0} is not on the grid")]
    DissectionOffGrid(f64),
    #[error("solution diverged: |Y| = {norm:e} at t = {time}")]
    Divergence { time: f64, norm: f64 },
    #[error("primitive basis degree {basis} is below the required {required}")]
    BasisTooSmall { basis: usize, required: usize },
    #[error("approximation budget {budget} not reachable at this grid resolution (best {best})")]
    BudgetUnattainable { budget: f64, best: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
