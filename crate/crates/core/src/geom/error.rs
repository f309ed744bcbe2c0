use crate::expr::ExprError;
use thiserror::Error;

/// Errors from chart geometry and quadrature.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("metric is not positive definite at {point}")]
    NotPositiveDefinite { point: String },

    #[error("weight is not positive at {point}")]
    NonPositiveWeight { point: String },

    #[error("chart dimension {dim} unsupported (1..=3)")]
    BadDimension { dim: usize },

    #[error("domain box has {got} axes, expected {expected}")]
    BadDomain { got: usize, expected: usize },

    #[error("metric must be a {dim}x{dim} array of expressions")]
    BadMetricShape { dim: usize },

    #[error("metric entries g[{i}][{j}] and g[{j}][{i}] differ at {point} by {diff}")]
    AsymmetricMetric { i: usize, j: usize, point: String, diff: f64 },

    #[error("resolution {got} on axis {axis} is below the minimum of 8")]
    ResolutionTooCoarse { axis: usize, got: usize },

    #[error("integrand is not finite at node {node} ({point})")]
    NonFiniteIntegrand { node: usize, point: String },

    #[error("field `{what}` fails boundary admissibility on chart `{space}`")]
    NotAdmissible { what: String, space: String },

    #[error("a test vector may carry at most {max} atoms, got {got}")]
    TooManyAtoms { max: usize, got: usize },

    #[error("a test vector needs at least one atom")]
    EmptyAtomList,

    #[error(transparent)]
    Expr(#[from] ExprError),
}
