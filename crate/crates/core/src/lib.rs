//! Weak-form differential geometry on weighted Riemannian charts.
//!
//! This crate evaluates covariant derivatives, Lie brackets and the Riemann
//! curvature tensor as *functionals* — quadrature-backed linear maps acting
//! on test vector fields — and verifies the algebraic identities these
//! objects satisfy as quantitative residual checks.
//!
//! The layers, bottom to top:
//!
//! - [`expr`]: expression parsing and exact forward-mode jets (derivatives
//!   up to order 3).
//! - [`geom`]: weighted charts, metric data, Christoffel symbols, pointwise
//!   field calculus, a classical curvature tensor for cross-checks, and
//!   tensor-product quadrature with deterministic pairwise reduction.
//! - [`distr`]: the weak-form operators themselves, assembled by integration
//!   by parts, plus the sectional-curvature margin probe.
//! - [`suite`]: randomized field generation, the identity battery,
//!   classical-oracle comparisons and grid-refinement studies, producing
//!   [`suite::CheckReport`]s.
//!
//! The numeric core is generic over the scalar type via [`real::Real`]
//! (`f32` or `f64`); the aliases below fix the `f64` instantiation used by
//! the command-line front end and all quoted tolerances.

pub mod distr;
pub mod expr;
pub mod geom;
pub mod real;
pub mod suite;

pub use real::Real;

/// `f64` expression tree.
pub type Expr = expr::ExprAst<f64>;
/// `f64` third-order jet.
pub type Jet = expr::Jet3<f64>;
/// `f64` weighted chart.
pub type Space = geom::ChartSpace<f64>;
/// `f64` quadrature grid.
pub type Grid = geom::QuadratureGrid<f64>;
/// `f64` test function.
pub type TestFn = geom::TestFunction<f64>;
/// `f64` test vector field.
pub type TestVec = geom::TestVector<f64>;
