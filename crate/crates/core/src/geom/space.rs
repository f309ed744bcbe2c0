//! Weighted Riemannian charts and the admissible test objects living on them.

use std::collections::BTreeMap;

use super::error::GeomError;
use crate::expr::{eval_jet, parse_expr, ExprAst, ExprError, Jet3, MAX_DIM};
use crate::real::Real;

/// Default tolerance for boundary admissibility checks.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

/// Largest number of atoms a test vector may carry.
pub const MAX_ATOMS: usize = 8;

/// A chart with metric `g_ij`, weight `w > 0` and reference measure
/// `dm = w · sqrt(det g) · dx`. Axes are either periodic (the two faces are
/// identified) or bounded (fields must vanish there, jets and all).
#[derive(Clone, Debug)]
pub struct ChartSpace<T = f64> {
    name: String,
    dim: usize,
    domain: Vec<(T, T)>,
    periodic: Vec<bool>,
    /// Row-major `dim*dim` entries; construction stores the upper triangle
    /// mirrored, so symmetry is structural.
    metric: Vec<ExprAst<T>>,
    weight: ExprAst<T>,
}

impl<T: Real> ChartSpace<T> {
    pub fn new(
        name: impl Into<String>,
        domain: Vec<(T, T)>,
        periodic: Vec<bool>,
        metric: Vec<Vec<ExprAst<T>>>,
        weight: ExprAst<T>,
    ) -> Result<Self, GeomError> {
        let dim = domain.len();
        if dim < 1 || dim > MAX_DIM {
            return Err(GeomError::BadDimension { dim });
        }
        if periodic.len() != dim {
            return Err(GeomError::BadDomain { got: periodic.len(), expected: dim });
        }
        if metric.len() != dim || metric.iter().any(|row| row.len() != dim) {
            return Err(GeomError::BadMetricShape { dim });
        }
        // mirror the upper triangle so g_ij and g_ji share one tree
        let mut flat = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                flat.push(metric[a][b].clone());
            }
        }
        Ok(ChartSpace {
            name: name.into(),
            dim,
            domain,
            periodic,
            metric: flat,
            weight,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[(T, T)] {
        &self.domain
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn metric_expr(&self, i: usize, j: usize) -> &ExprAst<T> {
        &self.metric[i * self.dim + j]
    }

    pub fn weight_expr(&self) -> &ExprAst<T> {
        &self.weight
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    /// Names understood by [`ChartSpace::builtin`].
    pub fn builtin_names() -> &'static [&'static str] {
        &["euclidean", "torus", "sphere", "hyperbolic-disk", "gauss-weighted-plane"]
    }

    /// Constant sectional curvature of a built-in backend, when known.
    pub fn builtin_curvature(name: &str) -> Option<f64> {
        match name {
            "euclidean" | "torus" | "gauss-weighted-plane" => Some(0.0),
            "sphere" => Some(1.0),
            "hyperbolic-disk" => Some(-1.0),
            _ => None,
        }
    }

    /// A named backend with documented defaults:
    ///
    /// - `euclidean`: flat unweighted `[-1,1]^2`, bounded.
    /// - `torus`: flat unweighted `[0,2π)^2`, both axes periodic.
    /// - `sphere`: unit sphere in polar coordinates `(θ, φ)` on
    ///   `(0,π) × [0,2π)`, Gauss-Legendre in `θ`, periodic in `φ`.
    /// - `hyperbolic-disk`: Poincaré metric `4/(1-r^2)^2 δ` on the square of
    ///   half-width `0.9/√2`, so the radius over the box is capped at 0.9.
    /// - `gauss-weighted-plane`: flat `[-7,7]^2` with weight
    ///   `exp(-(x0^2+x1^2)/2)`.
    pub fn builtin(name: &str) -> Option<Self> {
        let no_params = BTreeMap::new();
        let p = |text: &str, dim: usize| parse_expr::<T>(text, dim, &no_params).unwrap();
        let two_pi = T::PI() * T::of(2.0);
        let identity2 = vec![
            vec![p("1", 2), p("0", 2)],
            vec![p("0", 2), p("1", 2)],
        ];
        let space = match name {
            "euclidean" => ChartSpace::new(
                name,
                vec![(-T::one(), T::one()), (-T::one(), T::one())],
                vec![false, false],
                identity2,
                p("1", 2),
            ),
            "torus" => ChartSpace::new(
                name,
                vec![(T::zero(), two_pi), (T::zero(), two_pi)],
                vec![true, true],
                identity2,
                p("1", 2),
            ),
            "sphere" => ChartSpace::new(
                name,
                vec![(T::zero(), T::PI()), (T::zero(), two_pi)],
                vec![false, true],
                vec![
                    vec![p("1", 2), p("0", 2)],
                    vec![p("0", 2), p("sin(x0)*sin(x0)", 2)],
                ],
                p("1", 2),
            ),
            "hyperbolic-disk" => {
                let half = T::of(0.9) / T::of(2.0).sqrt();
                ChartSpace::new(
                    name,
                    vec![(-half, half), (-half, half)],
                    vec![false, false],
                    vec![
                        vec![p("4/(1-x0*x0-x1*x1)^2", 2), p("0", 2)],
                        vec![p("0", 2), p("4/(1-x0*x0-x1*x1)^2", 2)],
                    ],
                    p("1", 2),
                )
            }
            "gauss-weighted-plane" => ChartSpace::new(
                name,
                vec![(-T::of(7.0), T::of(7.0)), (-T::of(7.0), T::of(7.0))],
                vec![false, false],
                identity2,
                p("exp(-(x0*x0+x1*x1)/2)", 2),
            ),
            _ => return None,
        };
        Some(space.expect("built-in charts are well formed"))
    }

    /// Sample points covering the face `x_axis = value` on a coarse
    /// `8^(d-1)` lattice of the remaining coordinates.
    fn face_points(&self, axis: usize, value: T) -> Vec<Vec<T>> {
        let per_axis = 8usize;
        let others: Vec<usize> = (0..self.dim).filter(|&a| a != axis).collect();
        let count = per_axis.pow(others.len() as u32);
        let mut points = Vec::with_capacity(count);
        for idx in 0..count {
            let mut point = vec![T::zero(); self.dim];
            point[axis] = value;
            let mut rem = idx;
            for &a in &others {
                let k = rem % per_axis;
                rem /= per_axis;
                let (lo, hi) = self.domain[a];
                // stay off corners: interior offsets (k + 1/2) / per_axis
                let frac = (T::of(k as f64) + T::of(0.5)) / T::of(per_axis as f64);
                point[a] = lo + (hi - lo) * frac;
            }
            points.push(point);
        }
        points
    }

    /// True when `e` admits exact integration by parts on this chart: on
    /// every periodic axis its jets match across the identified faces, and on
    /// every bounded axis its jets vanish on both faces, all within `tol`.
    pub fn admissible(&self, e: &ExprAst<T>, tol: T) -> Result<bool, ExprError> {
        for axis in 0..self.dim {
            let (lo, hi) = self.domain[axis];
            if self.periodic[axis] {
                for mut point in self.face_points(axis, lo) {
                    let a = eval_jet(e, &point, 3)?;
                    point[axis] = hi;
                    let b = eval_jet(e, &point, 3)?;
                    let bound = tol * (T::one() + a.max_abs().max(b.max_abs()));
                    if a.max_abs_diff(&b) > bound {
                        return Ok(false);
                    }
                }
            } else {
                for value in [lo, hi] {
                    for point in self.face_points(axis, value) {
                        if eval_jet(e, &point, 3)?.max_abs() > tol {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Like [`ChartSpace::admissible`] but only checks the periodic faces;
    /// used for the metric and weight, which need not vanish on bounded axes.
    pub fn periodic_faces_match(&self, e: &ExprAst<T>, tol: T) -> Result<bool, ExprError> {
        for axis in 0..self.dim {
            if !self.periodic[axis] {
                continue;
            }
            let (lo, hi) = self.domain[axis];
            for mut point in self.face_points(axis, lo) {
                let a = eval_jet(e, &point, 2)?;
                point[axis] = hi;
                let b = eval_jet(e, &point, 2)?;
                let bound = tol * (T::one() + a.max_abs().max(b.max_abs()));
                if a.max_abs_diff(&b) > bound {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Predicate form of [`ChartSpace::admissible`]; evaluation failures count
/// as inadmissible.
pub fn periodicity_check<T: Real>(e: &ExprAst<T>, space: &ChartSpace<T>, tol: T) -> bool {
    space.admissible(e, tol).unwrap_or(false)
}

/// A scalar test object: smooth, and admissible on its chart.
#[derive(Clone, Debug)]
pub struct TestFunction<T = f64> {
    expr: ExprAst<T>,
}

impl<T: Real> TestFunction<T> {
    /// Validates admissibility on `space` at the default tolerance.
    pub fn new(expr: ExprAst<T>, space: &ChartSpace<T>) -> Result<Self, GeomError> {
        if !periodicity_check(&expr, space, T::of(ADMISSIBILITY_TOL)) {
            return Err(GeomError::NotAdmissible {
                what: format!("{}", expr),
                space: space.name().to_string(),
            });
        }
        Ok(TestFunction { expr })
    }

    /// Skips the admissibility check; the caller vouches for the field.
    pub fn new_unchecked(expr: ExprAst<T>) -> Self {
        TestFunction { expr }
    }

    pub fn expr(&self) -> &ExprAst<T> {
        &self.expr
    }

    /// The product `f·g`, as the tree `Mul(f, g)`. Using this constructor
    /// everywhere makes module-action identities hold bitwise.
    pub fn product(f: &TestFunction<T>, g: &TestFunction<T>) -> TestFunction<T> {
        TestFunction {
            expr: f.expr.clone().mul(g.expr.clone()),
        }
    }

    pub fn jet(&self, p: &[T], order: usize) -> Result<Jet3<T>, ExprError> {
        eval_jet(&self.expr, p, order)
    }
}

/// A test vector field `X = Σ f_i ∇g_i`, a finite list of gradient atoms
/// scaled by test functions.
#[derive(Clone, Debug)]
pub struct TestVector<T = f64> {
    atoms: Vec<(TestFunction<T>, TestFunction<T>)>,
}

impl<T: Real> TestVector<T> {
    pub fn new(
        atoms: Vec<(TestFunction<T>, TestFunction<T>)>,
        space: &ChartSpace<T>,
    ) -> Result<Self, GeomError> {
        if atoms.is_empty() {
            return Err(GeomError::EmptyAtomList);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(GeomError::TooManyAtoms { max: MAX_ATOMS, got: atoms.len() });
        }
        let tol = T::of(ADMISSIBILITY_TOL);
        for (f, g) in &atoms {
            for part in [f, g] {
                if !periodicity_check(part.expr(), space, tol) {
                    return Err(GeomError::NotAdmissible {
                        what: format!("{}", part.expr()),
                        space: space.name().to_string(),
                    });
                }
            }
        }
        Ok(TestVector { atoms })
    }

    pub fn new_unchecked(atoms: Vec<(TestFunction<T>, TestFunction<T>)>) -> Self {
        TestVector { atoms }
    }

    /// Single gradient atom `f ∇g`.
    pub fn atom(f: TestFunction<T>, g: TestFunction<T>) -> Self {
        TestVector { atoms: vec![(f, g)] }
    }

    pub fn atoms(&self) -> &[(TestFunction<T>, TestFunction<T>)] {
        &self.atoms
    }

    /// The module action `h·X`: every scale function is multiplied by `h`.
    pub fn scaled(&self, h: &TestFunction<T>) -> TestVector<T> {
        TestVector {
            atoms: self
                .atoms
                .iter()
                .map(|(f, g)| (TestFunction::product(h, f), g.clone()))
                .collect(),
        }
    }

    /// True when all constituent functions are admissible on `space`.
    pub fn admissible(&self, space: &ChartSpace<T>, tol: T) -> bool {
        self.atoms.iter().all(|(f, g)| {
            periodicity_check(f.expr(), space, tol) && periodicity_check(g.expr(), space, tol)
        })
    }
}
