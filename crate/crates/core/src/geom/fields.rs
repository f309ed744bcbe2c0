//! Pointwise calculus of test vector fields: sampling `X = Σ f_i ∇g_i` with
//! two derivative orders, covariant derivative, weighted divergence and the
//! Lie bracket.

use super::error::GeomError;
use super::metric::{Mat3, MetricAtPoint};
use super::space::{TestFunction, TestVector};
use crate::expr::Jet3;
use crate::real::Real;

/// A vector field frozen at one point: components, their first derivatives,
/// and (when requested) their second derivatives, all in chart coordinates.
#[derive(Clone, Copy, Debug)]
pub struct VectorSample<T = f64> {
    pub dim: usize,
    /// `comp[i] = X^i`
    pub comp: [T; 3],
    /// `dcomp[i][j] = ∂_j X^i`
    pub dcomp: Mat3<T>,
    /// `d2comp[i][j][k] = ∂_k ∂_j X^i`
    pub d2comp: Option<[Mat3<T>; 3]>,
}

impl<T: Real> VectorSample<T> {
    pub fn zero(dim: usize) -> Self {
        VectorSample {
            dim,
            comp: [T::zero(); 3],
            dcomp: [[T::zero(); 3]; 3],
            d2comp: None,
        }
    }

    /// Constant field with the given components (all derivatives zero).
    pub fn constant(dim: usize, comp: [T; 3]) -> Self {
        VectorSample {
            dim,
            comp,
            dcomp: [[T::zero(); 3]; 3],
            d2comp: Some([[[T::zero(); 3]; 3]; 3]),
        }
    }

    /// The sample of `h·X` from the sample of `X` and the jet of `h`
    /// (order 2 needed when second derivatives are carried).
    pub fn scaled_by_jet(&self, h: &Jet3<T>) -> Self {
        let d = self.dim;
        let mut out = VectorSample::zero(d);
        for i in 0..d {
            out.comp[i] = h.value() * self.comp[i];
            for j in 0..d {
                out.dcomp[i][j] = h.d1(j) * self.comp[i] + h.value() * self.dcomp[i][j];
            }
        }
        if let Some(d2) = &self.d2comp {
            let mut o2 = [[[T::zero(); 3]; 3]; 3];
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        o2[i][j][k] = h.d2(j, k) * self.comp[i]
                            + h.d1(j) * self.dcomp[i][k]
                            + h.d1(k) * self.dcomp[i][j]
                            + h.value() * d2[i][j][k];
                    }
                }
            }
            out.d2comp = Some(o2);
        }
        out
    }
}

/// Gradient `(∇f)^i = g^ij ∂_j f` at `p`.
pub fn grad_vec<T: Real>(
    f: &TestFunction<T>,
    p: &[T],
    m: &MetricAtPoint<T>,
) -> Result<[T; 3], GeomError> {
    let jet = f.jet(p, 1)?;
    let mut out = [T::zero(); 3];
    for i in 0..m.dim {
        for j in 0..m.dim {
            out[i] += m.ginv[i][j] * jet.d1(j);
        }
    }
    Ok(out)
}

/// Hessian bilinear form `(Hf)_ij = ∂_i ∂_j f − Γ^k_ij ∂_k f` at `p`.
pub fn hessian_bilinear<T: Real>(
    f: &TestFunction<T>,
    p: &[T],
    m: &MetricAtPoint<T>,
) -> Result<Mat3<T>, GeomError> {
    let jet = f.jet(p, 2)?;
    let mut h = [[T::zero(); 3]; 3];
    for i in 0..m.dim {
        for j in 0..m.dim {
            let mut acc = jet.d2(i, j);
            for k in 0..m.dim {
                acc -= m.gamma[k][i][j] * jet.d1(k);
            }
            h[i][j] = acc;
        }
    }
    Ok(h)
}

/// Sample `X = Σ f_a ∇g_a` at `p`. Second derivatives of the components are
/// computed only when `want_d2` is set (they need third-order jets of the
/// gradient atoms).
pub fn field_sample<T: Real>(
    x: &TestVector<T>,
    p: &[T],
    m: &MetricAtPoint<T>,
    want_d2: bool,
) -> Result<VectorSample<T>, GeomError> {
    let d = m.dim;
    let (f_order, g_order) = if want_d2 { (2, 3) } else { (1, 2) };
    let mut out = VectorSample::zero(d);
    let mut d2 = [[[T::zero(); 3]; 3]; 3];
    for (f, g) in x.atoms() {
        let fj = f.jet(p, f_order)?;
        let gj = g.jet(p, g_order)?;

        // grad components and their chart derivatives
        let mut grad = [T::zero(); 3];
        let mut dgrad = [[T::zero(); 3]; 3]; // dgrad[i][k] = ∂_k (∇g)^i
        for i in 0..d {
            for j in 0..d {
                grad[i] += m.ginv[i][j] * gj.d1(j);
            }
            for k in 0..d {
                let mut acc = T::zero();
                for j in 0..d {
                    acc += m.dginv[k][i][j] * gj.d1(j) + m.ginv[i][j] * gj.d2(j, k);
                }
                dgrad[i][k] = acc;
            }
        }

        for i in 0..d {
            out.comp[i] += fj.value() * grad[i];
            for k in 0..d {
                out.dcomp[i][k] += fj.d1(k) * grad[i] + fj.value() * dgrad[i][k];
            }
        }

        if want_d2 {
            for i in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut d2grad = T::zero(); // ∂_l ∂_k (∇g)^i
                        for j in 0..d {
                            d2grad += m.d2ginv[l][k][i][j] * gj.d1(j)
                                + m.dginv[k][i][j] * gj.d2(j, l)
                                + m.dginv[l][i][j] * gj.d2(j, k)
                                + m.ginv[i][j] * gj.d3(j, k, l);
                        }
                        d2[i][k][l] += fj.d2(k, l) * grad[i]
                            + fj.d1(k) * dgrad[i][l]
                            + fj.d1(l) * dgrad[i][k]
                            + fj.value() * d2grad;
                    }
                }
            }
        }
    }
    if want_d2 {
        out.d2comp = Some(d2);
    }
    Ok(out)
}

/// Classical covariant derivative `(∇_X Y)^k = X^j ∂_j Y^k + Γ^k_ij X^i Y^j`.
pub fn cov_deriv_pointwise<T: Real>(
    x: &VectorSample<T>,
    y: &VectorSample<T>,
    m: &MetricAtPoint<T>,
) -> [T; 3] {
    let d = m.dim;
    let mut out = [T::zero(); 3];
    for k in 0..d {
        let mut acc = T::zero();
        for j in 0..d {
            acc += x.comp[j] * y.dcomp[k][j];
        }
        for i in 0..d {
            for j in 0..d {
                acc += m.gamma[k][i][j] * x.comp[i] * y.comp[j];
            }
        }
        out[k] = acc;
    }
    out
}

/// Weighted divergence `div_m X = ∂_i X^i + X^i ∂_i log(w sqrt(det g))`.
pub fn divergence_m<T: Real>(x: &VectorSample<T>, m: &MetricAtPoint<T>) -> T {
    let d = m.dim;
    let mut acc = T::zero();
    for i in 0..d {
        acc += x.dcomp[i][i] + x.comp[i] * m.dlog_m[i];
    }
    acc
}

/// Chart gradient of the weighted divergence; needs second derivatives on `x`.
pub fn d_divergence_m<T: Real>(x: &VectorSample<T>, m: &MetricAtPoint<T>) -> [T; 3] {
    let d2 = x
        .d2comp
        .as_ref()
        .expect("d_divergence_m needs a sample with second derivatives");
    let d = m.dim;
    let mut out = [T::zero(); 3];
    for j in 0..d {
        let mut acc = T::zero();
        for i in 0..d {
            acc += d2[i][i][j] + x.dcomp[i][j] * m.dlog_m[i] + x.comp[i] * m.d2log_m[i][j];
        }
        out[j] = acc;
    }
    out
}

/// Lie bracket `[X,Y]^k = X^j ∂_j Y^k − Y^j ∂_j X^k` with one derivative of
/// the components (second derivatives are consumed, not produced).
pub fn lie_bracket_pointwise<T: Real>(x: &VectorSample<T>, y: &VectorSample<T>) -> VectorSample<T> {
    let d = x.dim;
    let xd2 = x.d2comp.as_ref().expect("bracket needs d2comp on x");
    let yd2 = y.d2comp.as_ref().expect("bracket needs d2comp on y");
    let mut out = VectorSample::zero(d);
    for k in 0..d {
        let mut acc = T::zero();
        for j in 0..d {
            acc += x.comp[j] * y.dcomp[k][j] - y.comp[j] * x.dcomp[k][j];
        }
        out.comp[k] = acc;
        for l in 0..d {
            let mut da = T::zero();
            for j in 0..d {
                da += x.dcomp[j][l] * y.dcomp[k][j] + x.comp[j] * yd2[k][j][l]
                    - y.dcomp[j][l] * x.dcomp[k][j]
                    - y.comp[j] * xd2[k][j][l];
            }
            out.dcomp[k][l] = da;
        }
    }
    out
}
