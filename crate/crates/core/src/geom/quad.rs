//! Tensor-product quadrature over a chart with the reference measure
//! `dm = w · sqrt(det g) · dx` baked into the node weights.
//!
//! Periodic axes use the equispaced rule (spectrally accurate there);
//! bounded axes use Gauss-Legendre. Accumulation is always the same
//! pairwise tree over node index order, so sums are identical regardless
//! of how the per-node values were produced.

use super::error::GeomError;
use super::metric::{metric_at, MetricAtPoint};
use super::space::ChartSpace;
use crate::real::Real;

/// Minimum nodes per axis.
pub const MIN_RESOLUTION: usize = 8;

/// Per-axis quadrature rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisRule {
    /// Left-endpoint rule on an identified interval (exact for trigonometric
    /// polynomials below the aliasing frequency).
    Equispaced,
    /// Gauss-Legendre, scaled to the axis interval.
    GaussLegendre,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess
        let guess = ((T::of(i as f64) + T::of(0.75)) / (T::of(n as f64) + T::of(0.5)) * T::PI()).cos();
        let mut z = guess;
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let step = p / dp;
            z = z - step;
            if step.abs() <= T::epsilon() * T::of(4.0) {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let w = T::of(2.0) / ((T::one() - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n` and its derivative at `x`.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::of(k as f64);
        let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::of(n as f64) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    if values.len() <= 8 {
        let mut acc = T::zero();
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// An immutable tensor grid with per-node metric data cached.
#[derive(Clone, Debug)]
pub struct QuadratureGrid<T = f64> {
    space: ChartSpace<T>,
    resolution: Vec<usize>,
    rules: Vec<AxisRule>,
    /// `dim` coordinates per node, node-major.
    coords: Vec<T>,
    /// Coordinate weight times `w · sqrt(det g)` at the node.
    weights: Vec<T>,
    metric: Vec<MetricAtPoint<T>>,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn space(&self) -> &ChartSpace<T> {
        &self.space
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn rules(&self) -> &[AxisRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[T] {
        let d = self.space.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn metric(&self, i: usize) -> &MetricAtPoint<T> {
        &self.metric[i]
    }

    /// Measure weight at node `i` (already includes `w · sqrt(det g)`).
    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    /// `∫ f dm` with the deterministic pairwise reduction.
    pub fn integrate(&self, f: impl Fn(usize) -> T) -> T {
        let values: Vec<T> = (0..self.len()).map(|i| self.weights[i] * f(i)).collect();
        pairwise_sum(&values)
    }

    /// Like [`QuadratureGrid::integrate`], failing fast on a non-finite
    /// integrand value.
    pub fn integrate_checked(&self, f: impl Fn(usize) -> T) -> Result<T, GeomError> {
        let mut values = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let v = f(i);
            if !v.is_finite() {
                return Err(GeomError::NonFiniteIntegrand {
                    node: i,
                    point: format!("{:?}", self.node(i).iter().map(|x| x.as_f64()).collect::<Vec<_>>()),
                });
            }
            values.push(self.weights[i] * v);
        }
        Ok(pairwise_sum(&values))
    }
}

/// Build the grid, evaluating and screening the metric and weight at every
/// node. `rule_override`, when given, replaces the per-axis default
/// (equispaced on periodic axes, Gauss-Legendre on bounded ones).
pub fn build_grid<T: Real>(
    space: &ChartSpace<T>,
    resolution: &[usize],
    rule_override: Option<&[AxisRule]>,
) -> Result<QuadratureGrid<T>, GeomError> {
    let d = space.dim();
    if resolution.len() != d {
        return Err(GeomError::BadDomain { got: resolution.len(), expected: d });
    }
    for (axis, &n) in resolution.iter().enumerate() {
        if n < MIN_RESOLUTION {
            return Err(GeomError::ResolutionTooCoarse { axis, got: n });
        }
    }

    let rules: Vec<AxisRule> = match rule_override {
        Some(r) => r.to_vec(),
        None => space
            .periodic()
            .iter()
            .map(|&p| if p { AxisRule::Equispaced } else { AxisRule::GaussLegendre })
            .collect(),
    };

    let mut axis_nodes: Vec<Vec<T>> = Vec::with_capacity(d);
    let mut axis_weights: Vec<Vec<T>> = Vec::with_capacity(d);
    for axis in 0..d {
        let n = resolution[axis];
        let (lo, hi) = space.domain()[axis];
        let len = hi - lo;
        match rules[axis] {
            AxisRule::Equispaced => {
                let h = len / T::of(n as f64);
                axis_nodes.push((0..n).map(|k| lo + h * T::of(k as f64)).collect());
                axis_weights.push(vec![h; n]);
            }
            AxisRule::GaussLegendre => {
                let (xs, ws) = gauss_legendre::<T>(n);
                let half = T::of(0.5);
                let mid = (lo + hi) * half;
                let scale = len * half;
                axis_nodes.push(xs.iter().map(|&x| mid + scale * x).collect());
                axis_weights.push(ws.iter().map(|&w| w * scale).collect());
            }
        }
    }

    let total: usize = resolution.iter().product();
    let mut coords = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut metric = Vec::with_capacity(total);
    let mut point = vec![T::zero(); d];
    for flat in 0..total {
        let mut rem = flat;
        let mut cw = T::one();
        // axis 0 is the slowest index, fixing the node order
        for axis in (0..d).rev() {
            let k = rem % resolution[axis];
            rem /= resolution[axis];
            point[axis] = axis_nodes[axis][k];
            cw *= axis_weights[axis][k];
        }
        let m = metric_at(space, &point)?;
        weights.push(cw * m.w_jet.value() * m.sqrt_det);
        metric.push(m);
        coords.extend_from_slice(&point);
    }

    Ok(QuadratureGrid {
        space: space.clone(),
        resolution: resolution.to_vec(),
        rules,
        coords,
        weights,
        metric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (xs, ws) = gauss_legendre::<f64>(8);
        // degree 15 is exact for 8 nodes: ∫ x^14 over [-1,1] = 2/15
        let val: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * x.powi(14)).sum();
        assert_relative_eq!(val, 2.0 / 15.0, epsilon = 1e-14);
        let odd: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * x.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn pairwise_sum_matches_exact_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    #[test]
    fn torus_trig_integral_is_spectrally_exact() {
        let space = ChartSpace::<f64>::builtin("torus").unwrap();
        let grid = build_grid(&space, &[32, 32], None).unwrap();
        let val = grid.integrate(|i| grid.node(i)[0].sin().powi(2));
        let expect = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(val, expect, max_relative = 1e-12);
    }

    #[test]
    fn sphere_surface_area() {
        let space = ChartSpace::<f64>::builtin("sphere").unwrap();
        let grid = build_grid(&space, &[64, 64], None).unwrap();
        let val = grid.integrate(|_| 1.0);
        assert_relative_eq!(val, 4.0 * std::f64::consts::PI, max_relative = 1e-8);
    }

    #[test]
    fn gaussian_weight_mass_is_two_pi() {
        let space = ChartSpace::<f64>::builtin("gauss-weighted-plane").unwrap();
        let grid = build_grid(&space, &[64, 64], None).unwrap();
        let val = grid.integrate(|_| 1.0);
        assert_relative_eq!(val, 2.0 * std::f64::consts::PI, max_relative = 1e-10);
    }

    #[test]
    fn gaussian_mass_on_six_box_matches_erf_oracle() {
        // the [-6,6]^2 box misses the tails; compare against the erf value
        use std::collections::BTreeMap;
        use crate::expr::parse_expr;
        let p = |t: &str| parse_expr::<f64>(t, 2, &BTreeMap::new()).unwrap();
        let space = ChartSpace::new(
            "gauss-box-6",
            vec![(-6.0, 6.0), (-6.0, 6.0)],
            vec![false, false],
            vec![vec![p("1"), p("0")], vec![p("0"), p("1")]],
            p("exp(-(x0*x0+x1*x1)/2)"),
        )
        .unwrap();
        let grid = build_grid(&space, &[64, 64], None).unwrap();
        let val = grid.integrate(|_| 1.0);
        // (∫_{-6}^{6} e^{-x²/2} dx)² = 2π · erf(6/√2)², with
        // erf(6/√2) = 1 - 2·Q(6), Q(6) = 9.865876450376946e-10
        let q6 = 9.865876450376946e-10;
        let expect = 2.0 * std::f64::consts::PI * (1.0 - 2.0 * q6).powi(2);
        assert_relative_eq!(val, expect, max_relative = 1e-12);
        // and is visibly below 2π at the ~4e-9 level (tail truncation)
        let rel = (2.0 * std::f64::consts::PI - val) / (2.0 * std::f64::consts::PI);
        assert!(rel > 1e-9 && rel < 1e-8, "rel = {rel:e}");
    }

    #[test]
    fn resolution_floor_is_enforced() {
        let space = ChartSpace::<f64>::builtin("torus").unwrap();
        assert!(matches!(
            build_grid(&space, &[4, 32], None),
            Err(GeomError::ResolutionTooCoarse { axis: 0, got: 4 })
        ));
    }

    #[test]
    fn non_finite_integrand_is_rejected() {
        let space = ChartSpace::<f64>::builtin("torus").unwrap();
        let grid = build_grid(&space, &[8, 8], None).unwrap();
        let res = grid.integrate_checked(|i| if i == 3 { f64::NAN } else { 1.0 });
        assert!(matches!(res, Err(GeomError::NonFiniteIntegrand { node: 3, .. })));
    }
}
