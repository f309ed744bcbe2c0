//! Pointwise metric data: inverse, Christoffel symbols and their first
//! derivatives, weight jets, and the log-derivative of the reference measure.

use super::error::GeomError;
use super::space::ChartSpace;
use crate::expr::{eval_jet, Jet3};
use crate::real::Real;

pub type Mat3<T> = [[T; 3]; 3];
pub type Ten3<T> = [Mat3<T>; 3];
pub type Ten4<T> = [Ten3<T>; 3];

fn zero_mat<T: Real>() -> Mat3<T> {
    [[T::zero(); 3]; 3]
}

/// Determinant of the leading `d x d` block.
fn det<T: Real>(g: &Mat3<T>, d: usize) -> T {
    match d {
        1 => g[0][0],
        2 => g[0][0] * g[1][1] - g[0][1] * g[1][0],
        _ => {
            g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
        }
    }
}

/// Inverse of the leading `d x d` block; `None` when singular.
fn inverse<T: Real>(g: &Mat3<T>, d: usize) -> Option<Mat3<T>> {
    let dt = det(g, d);
    if dt == T::zero() {
        return None;
    }
    let mut inv = zero_mat();
    match d {
        1 => inv[0][0] = T::one() / dt,
        2 => {
            inv[0][0] = g[1][1] / dt;
            inv[1][1] = g[0][0] / dt;
            inv[0][1] = -g[0][1] / dt;
            inv[1][0] = -g[1][0] / dt;
        }
        _ => {
            for i in 0..3 {
                for j in 0..3 {
                    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                    let (c, e) = ((j + 1) % 3, (j + 2) % 3);
                    // cofactor transpose
                    inv[j][i] = (g[a][c] * g[b][e] - g[a][e] * g[b][c]) / dt;
                }
            }
        }
    }
    Some(inv)
}

/// Positive definiteness via leading principal minors.
fn positive_definite<T: Real>(g: &Mat3<T>, d: usize) -> bool {
    (1..=d).all(|k| det(g, k) > T::zero())
}

/// Everything the field calculus needs about the chart at one point.
#[derive(Clone, Copy, Debug)]
pub struct MetricAtPoint<T = f64> {
    pub dim: usize,
    pub g: Mat3<T>,
    pub ginv: Mat3<T>,
    pub det: T,
    pub sqrt_det: T,
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: Ten3<T>,
    /// `d2g[l][k][i][j] = ∂_l ∂_k g_ij`
    pub d2g: Ten4<T>,
    /// `dginv[k][i][j] = ∂_k g^ij`
    pub dginv: Ten3<T>,
    /// `d2ginv[l][k][i][j] = ∂_l ∂_k g^ij`
    pub d2ginv: Ten4<T>,
    /// `gamma[k][i][j] = Γ^k_ij`
    pub gamma: Ten3<T>,
    /// `dgamma[l][k][i][j] = ∂_l Γ^k_ij`
    pub dgamma: Ten4<T>,
    /// Weight jet to order 2.
    pub w_jet: Jet3<T>,
    /// `∂_i log(w · sqrt(det g))`
    pub dlog_m: [T; 3],
    /// `∂_j ∂_i log(w · sqrt(det g))`
    pub d2log_m: Mat3<T>,
}

impl<T: Real> MetricAtPoint<T> {
    /// Metric inner product of two tangent vectors.
    pub fn inner(&self, x: &[T; 3], y: &[T; 3]) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.g[i][j] * x[i] * y[j];
            }
        }
        acc
    }

    /// Index lowering `(g x)_i`.
    pub fn lower(&self, x: &[T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.g[i][j] * x[j];
            }
        }
        out
    }
}

/// Evaluate the metric, weight and all derived connection data at `p`.
pub fn metric_at<T: Real>(space: &ChartSpace<T>, p: &[T]) -> Result<MetricAtPoint<T>, GeomError> {
    let d = space.dim();
    let fmt_point = || format!("{:?}", p.iter().map(|x| x.as_f64()).collect::<Vec<_>>());

    let mut g = zero_mat();
    let mut dg = [zero_mat(); 3];
    let mut d2g = [[zero_mat(); 3]; 3];
    for i in 0..d {
        for j in i..d {
            let jet = eval_jet(space.metric_expr(i, j), p, 2)?;
            g[i][j] = jet.value();
            g[j][i] = jet.value();
            for k in 0..d {
                dg[k][i][j] = jet.d1(k);
                dg[k][j][i] = jet.d1(k);
                for l in 0..d {
                    d2g[l][k][i][j] = jet.d2(l, k);
                    d2g[l][k][j][i] = jet.d2(l, k);
                }
            }
        }
    }

    if !positive_definite(&g, d) {
        return Err(GeomError::NotPositiveDefinite { point: fmt_point() });
    }
    let dt = det(&g, d);
    let ginv = inverse(&g, d).ok_or_else(|| GeomError::NotPositiveDefinite { point: fmt_point() })?;

    // ∂ g^-1 = -g^-1 (∂g) g^-1 and one more product-rule pass for ∂²
    let mut dginv = [zero_mat(); 3];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = T::zero();
                for a in 0..d {
                    for b in 0..d {
                        acc += ginv[i][a] * dg[k][a][b] * ginv[b][j];
                    }
                }
                dginv[k][i][j] = -acc;
            }
        }
    }
    let mut d2ginv = [[zero_mat(); 3]; 3];
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = T::zero();
                    for a in 0..d {
                        for b in 0..d {
                            acc += dginv[l][i][a] * dg[k][a][b] * ginv[b][j]
                                + ginv[i][a] * d2g[l][k][a][b] * ginv[b][j]
                                + ginv[i][a] * dg[k][a][b] * dginv[l][b][j];
                        }
                    }
                    d2ginv[l][k][i][j] = -acc;
                }
            }
        }
    }

    let half = T::of(0.5);
    let mut gamma = [zero_mat(); 3];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = T::zero();
                for l in 0..d {
                    acc += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = half * acc;
            }
        }
    }
    let mut dgamma = [[zero_mat(); 3]; 3];
    for m in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = T::zero();
                    for l in 0..d {
                        acc += dginv[m][k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                            + ginv[k][l]
                                * (d2g[m][i][j][l] + d2g[m][j][i][l] - d2g[m][l][i][j]);
                    }
                    dgamma[m][k][i][j] = half * acc;
                }
            }
        }
    }

    // det derivatives through the adjugate identity ∂ det = det · tr(g^-1 ∂g)
    let trace = |m: &Mat3<T>, n: &Mat3<T>| {
        let mut acc = T::zero();
        for i in 0..d {
            for j in 0..d {
                acc += m[i][j] * n[j][i];
            }
        }
        acc
    };
    let mut ddet = [T::zero(); 3];
    for k in 0..d {
        ddet[k] = dt * trace(&ginv, &dg[k]);
    }
    let mut d2det = zero_mat();
    for l in 0..d {
        for k in 0..d {
            d2det[l][k] =
                ddet[l] * trace(&ginv, &dg[k]) + dt * (trace(&dginv[l], &dg[k]) + trace(&ginv, &d2g[l][k]));
        }
    }

    let w_jet = eval_jet(space.weight_expr(), p, 2)?;
    let w = w_jet.value();
    if w <= T::zero() {
        return Err(GeomError::NonPositiveWeight { point: fmt_point() });
    }

    let mut dlog_m = [T::zero(); 3];
    for i in 0..d {
        dlog_m[i] = w_jet.d1(i) / w + half * ddet[i] / dt;
    }
    let mut d2log_m = zero_mat();
    for i in 0..d {
        for j in 0..d {
            d2log_m[i][j] = w_jet.d2(i, j) / w - w_jet.d1(i) * w_jet.d1(j) / (w * w)
                + half * (d2det[i][j] / dt - ddet[i] * ddet[j] / (dt * dt));
        }
    }

    Ok(MetricAtPoint {
        dim: d,
        g,
        ginv,
        det: dt,
        sqrt_det: dt.sqrt(),
        dg,
        d2g,
        dginv,
        d2ginv,
        gamma,
        dgamma,
        w_jet,
        dlog_m,
        d2log_m,
    })
}

/// The classical Riemann tensor of the chart metric at one point, used as a
/// smooth-case benchmark for the weak-form curvature operator.
#[derive(Clone, Copy, Debug)]
pub struct RiemannAtPoint<T = f64> {
    pub dim: usize,
    /// `up[l][k][i][j] = (R(e_i, e_j) e_k)^l`
    pub up: Ten4<T>,
    /// Fully lowered array with `low[i][j][k][l] = ⟨R(e_i,e_j) e_l, e_k⟩`.
    /// In this layout the unit sphere has `low[θ][φ][θ][φ] = sin²θ`.
    pub low: Ten4<T>,
}

impl<T: Real> RiemannAtPoint<T> {
    /// The vector `R(x, y) z`.
    pub fn apply(&self, x: &[T; 3], y: &[T; 3], z: &[T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for l in 0..self.dim {
            let mut acc = T::zero();
            for k in 0..self.dim {
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        acc += self.up[l][k][i][j] * z[k] * x[i] * y[j];
                    }
                }
            }
            out[l] = acc;
        }
        out
    }

    /// The scalar `⟨R(x, y) z, w⟩`. On the unit sphere this is positive for
    /// `x = z`, `y = w` independent (sectional curvature +1).
    pub fn scalar(&self, m: &MetricAtPoint<T>, x: &[T; 3], y: &[T; 3], z: &[T; 3], w: &[T; 3]) -> T {
        let v = self.apply(x, y, z);
        m.inner(&v, w)
    }

    /// Largest absolute entry of the lowered array.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    for l in 0..self.dim {
                        m = m.max(self.low[i][j][k][l].abs());
                    }
                }
            }
        }
        m
    }
}

/// Evaluate the classical curvature tensor at `p` from the Christoffel
/// symbols and their derivatives:
/// `(R(e_i,e_j)e_k)^l = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`.
pub fn riemann_oracle<T: Real>(
    space: &ChartSpace<T>,
    p: &[T],
) -> Result<RiemannAtPoint<T>, GeomError> {
    let m = metric_at(space, p)?;
    Ok(riemann_from_metric(&m))
}

/// Same as [`riemann_oracle`], reusing already-computed metric data.
pub fn riemann_from_metric<T: Real>(m: &MetricAtPoint<T>) -> RiemannAtPoint<T> {
    let d = m.dim;
    let mut up = [[zero_mat(); 3]; 3];
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = m.dgamma[i][l][j][k] - m.dgamma[j][l][i][k];
                    for mm in 0..d {
                        acc += m.gamma[l][i][mm] * m.gamma[mm][j][k]
                            - m.gamma[l][j][mm] * m.gamma[mm][i][k];
                    }
                    up[l][k][i][j] = acc;
                }
            }
        }
    }
    let mut low = [[zero_mat(); 3]; 3];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut acc = T::zero();
                    for mm in 0..d {
                        acc += m.g[k][mm] * up[mm][l][i][j];
                    }
                    low[i][j][k][l] = acc;
                }
            }
        }
    }
    RiemannAtPoint { dim: d, up, low }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere_at(theta: f64) -> (ChartSpace<f64>, Vec<f64>) {
        (ChartSpace::builtin("sphere").unwrap(), vec![theta, 1.3])
    }

    #[test]
    fn euclidean_chart_is_flat() {
        let space = ChartSpace::<f64>::builtin("euclidean").unwrap();
        let m = metric_at(&space, &[0.3, -0.4]).unwrap();
        assert_eq!(m.sqrt_det, 1.0);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(m.gamma[k][i][j], 0.0);
                }
            }
        }
        let r = riemann_from_metric(&m);
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn sphere_christoffels_match_closed_forms() {
        // Γ^θ_φφ = -sinθ cosθ, Γ^φ_θφ = cotθ, everything else zero
        for theta in [0.4, std::f64::consts::FRAC_PI_2, 2.2] {
            let (space, p) = sphere_at(theta);
            let m = metric_at(&space, &p).unwrap();
            assert_relative_eq!(
                m.gamma[0][1][1],
                -theta.sin() * theta.cos(),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                m.gamma[1][0][1],
                theta.cos() / theta.sin(),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
            assert_eq!(m.gamma[0][0][0], 0.0);
            assert_eq!(m.gamma[0][0][1], 0.0);
        }
    }

    #[test]
    fn poincare_disk_at_origin() {
        let space = ChartSpace::<f64>::builtin("hyperbolic-disk").unwrap();
        let m = metric_at(&space, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(m.sqrt_det, 4.0, epsilon = 1e-14);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_relative_eq!(m.gamma[k][i][j], 0.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn conformal_christoffels_match_symbolic_oracle() {
        // For g = λδ: Γ^k_ij = (δ_ki ∂_j λ + δ_kj ∂_i λ - δ_ij ∂_k λ) / (2λ)
        let space = ChartSpace::<f64>::builtin("hyperbolic-disk").unwrap();
        for p in [[0.2, 0.1], [-0.3, 0.25], [0.4, -0.4]] {
            let m = metric_at(&space, &p).unwrap();
            let r2 = p[0] * p[0] + p[1] * p[1];
            let lam = 4.0 / (1.0 - r2).powi(2);
            let dlam = [
                16.0 * p[0] / (1.0 - r2).powi(3),
                16.0 * p[1] / (1.0 - r2).powi(3),
            ];
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let mut expect = 0.0;
                        if k == i {
                            expect += dlam[j];
                        }
                        if k == j {
                            expect += dlam[i];
                        }
                        if i == j {
                            expect -= dlam[k];
                        }
                        expect /= 2.0 * lam;
                        assert_relative_eq!(m.gamma[k][i][j], expect, epsilon = 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn ginv_is_inverse_within_condition_number() {
        let space = ChartSpace::<f64>::builtin("sphere").unwrap();
        let m = metric_at(&space, &[0.2, 4.0]).unwrap();
        let cond = (1.0f64).max(1.0 / (0.2f64).sin().powi(2));
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += m.g[i][k] * m.ginv[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() <= 1e-12 * cond);
            }
        }
    }

    #[test]
    fn dgamma_matches_finite_differences_of_gamma() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = 1e-4;
        for name in ["sphere", "hyperbolic-disk", "gauss-weighted-plane"] {
            let space = ChartSpace::<f64>::builtin(name).unwrap();
            for _ in 0..100 {
                let p: Vec<f64> = space
                    .domain()
                    .iter()
                    .map(|&(lo, hi)| {
                        let pad = 0.2 * (hi - lo);
                        rng.gen_range(lo + pad..hi - pad)
                    })
                    .collect();
                let m = metric_at(&space, &p).unwrap();
                for axis in 0..2 {
                    let mut pp = p.clone();
                    pp[axis] += h;
                    let mp = metric_at(&space, &pp).unwrap();
                    pp[axis] -= 2.0 * h;
                    let mm = metric_at(&space, &pp).unwrap();
                    for k in 0..2 {
                        for i in 0..2 {
                            for j in 0..2 {
                                let fd = (mp.gamma[k][i][j] - mm.gamma[k][i][j]) / (2.0 * h);
                                let exact = m.dgamma[axis][k][i][j];
                                let scale = 1.0 + exact.abs();
                                assert!(
                                    (fd - exact).abs() <= 1e-5 * scale,
                                    "{name} dGamma[{axis}][{k}][{i}][{j}]: fd={fd}, exact={exact}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_riemann_entry_and_sign_convention() {
        let (space, p) = sphere_at(0.9);
        let r = riemann_oracle(&space, &p).unwrap();
        let s2 = (0.9f64).sin().powi(2);
        assert_relative_eq!(r.low[0][1][0][1], s2, epsilon = 1e-12, max_relative = 1e-12);
        // R(X,Y,Y,X) = |X|^2 |Y|^2 - <X,Y>^2 on the unit sphere
        let m = metric_at(&space, &p).unwrap();
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        let rxyyx = r.scalar(&m, &x, &y, &y, &x);
        assert_relative_eq!(rxyyx, s2, epsilon = 1e-12, max_relative = 1e-12);
    }

    #[test]
    fn disk_sectional_curvature_is_minus_one() {
        let space = ChartSpace::<f64>::builtin("hyperbolic-disk").unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
            let m = metric_at(&space, &p).unwrap();
            let r = riemann_from_metric(&m);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0];
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0];
            let wedge = m.inner(&x, &x) * m.inner(&y, &y) - m.inner(&x, &y).powi(2);
            let rxyyx = r.scalar(&m, &x, &y, &y, &x);
            assert_relative_eq!(rxyyx, -wedge, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn riemann_symmetries_hold_at_array_level() {
        let space = ChartSpace::<f64>::builtin("sphere").unwrap();
        let r = riemann_oracle(&space, &[1.1, 0.4]).unwrap();
        let tol = 1e-12 * r.max_abs();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let v = r.low[i][j][k][l];
                        assert!((v + r.low[j][i][k][l]).abs() <= tol);
                        assert!((v + r.low[i][j][l][k]).abs() <= tol);
                        assert!((v - r.low[k][l][i][j]).abs() <= tol);
                        let bianchi = v + r.low[i][k][l][j] + r.low[i][l][j][k];
                        assert!(bianchi.abs() <= tol);
                    }
                }
            }
        }
    }

    #[test]
    fn weight_does_not_enter_curvature() {
        let space = ChartSpace::<f64>::builtin("gauss-weighted-plane").unwrap();
        let r = riemann_oracle(&space, &[1.5, -2.0]).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }
}
