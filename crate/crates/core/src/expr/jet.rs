//! Third-order forward-mode jets in up to three chart variables.
//!
//! A [`Jet3`] carries a value together with all coordinate partials up to a
//! fixed order (at most 3). The second and third derivative blocks are stored
//! in packed symmetric layout, so index-permutation symmetry holds exactly,
//! not just to rounding.

use crate::real::Real;

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 3;

const D2_LEN: usize = 6; // symmetric pairs over 3 variables
const D3_LEN: usize = 10; // symmetric triples over 3 variables

/// Packed index of the symmetric pair `(i, j)` (any order) in dimension `d`.
#[inline]
pub fn sym2_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    debug_assert!(j < d);
    i * d - i * (i + 1) / 2 + j
}

/// Packed index of the symmetric triple `(i, j, k)` (any order) in dimension `d`.
#[inline]
pub fn sym3_index(d: usize, i: usize, j: usize, k: usize) -> usize {
    let (mut a, mut b, mut c) = (i, j, k);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if b > c {
        std::mem::swap(&mut b, &mut c);
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    debug_assert!(c < d);
    // triples starting below `a`, then the pair rank of (b-a, c-a) over d-a symbols
    let mut base = 0;
    for r in 0..a {
        let m = d - r;
        base += m * (m + 1) / 2;
    }
    let (bb, cc, m) = (b - a, c - a, d - a);
    base + bb * m - bb * (bb + 1) / 2 + cc
}

/// Number of packed second-order entries in dimension `d`.
#[inline]
pub fn sym2_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Number of packed third-order entries in dimension `d`.
#[inline]
pub fn sym3_len(d: usize) -> usize {
    d * (d + 1) * (d + 2) / 6
}

/// Value and partial derivatives up to `order` at a chart point.
///
/// Entries beyond `order` are kept at zero and must not be read; the
/// accessors enforce this in debug builds.
#[derive(Clone, Copy, Debug)]
pub struct Jet3<T> {
    dim: usize,
    order: usize,
    v: T,
    d1: [T; MAX_DIM],
    d2: [T; D2_LEN],
    d3: [T; D3_LEN],
}

impl<T: Real> Jet3<T> {
    /// Jet of the constant `c`.
    pub fn constant(c: T, dim: usize, order: usize) -> Self {
        debug_assert!(dim >= 1 && dim <= MAX_DIM && order <= 3);
        Jet3 {
            dim,
            order,
            v: c,
            d1: [T::zero(); MAX_DIM],
            d2: [T::zero(); D2_LEN],
            d3: [T::zero(); D3_LEN],
        }
    }

    /// Jet of the coordinate variable `x_i` evaluated at `x`.
    pub fn variable(i: usize, x: T, dim: usize, order: usize) -> Self {
        debug_assert!(i < dim);
        let mut jet = Self::constant(x, dim, order);
        if order >= 1 {
            jet.d1[i] = T::one();
        }
        jet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> T {
        self.v
    }

    /// First partial `∂_i`.
    pub fn d1(&self, i: usize) -> T {
        debug_assert!(self.order >= 1 && i < self.dim);
        self.d1[i]
    }

    /// Second partial `∂_i ∂_j` (symmetric by storage).
    pub fn d2(&self, i: usize, j: usize) -> T {
        debug_assert!(self.order >= 2);
        self.d2[sym2_index(self.dim, i, j)]
    }

    /// Third partial `∂_i ∂_j ∂_k` (symmetric by storage).
    pub fn d3(&self, i: usize, j: usize, k: usize) -> T {
        debug_assert!(self.order >= 3);
        self.d3[sym3_index(self.dim, i, j, k)]
    }

    /// All entries of all computed orders, for finiteness checks.
    pub fn all_finite(&self) -> bool {
        let d = self.dim;
        if !self.v.is_finite() {
            return false;
        }
        if self.order >= 1 && self.d1[..d].iter().any(|x| !x.is_finite()) {
            return false;
        }
        if self.order >= 2 && self.d2[..sym2_len(d)].iter().any(|x| !x.is_finite()) {
            return false;
        }
        if self.order >= 3 && self.d3[..sym3_len(d)].iter().any(|x| !x.is_finite()) {
            return false;
        }
        true
    }

    /// Largest absolute entry across computed orders.
    pub fn max_abs(&self) -> T {
        let d = self.dim;
        let mut m = self.v.abs();
        if self.order >= 1 {
            for x in &self.d1[..d] {
                m = m.max(x.abs());
            }
        }
        if self.order >= 2 {
            for x in &self.d2[..sym2_len(d)] {
                m = m.max(x.abs());
            }
        }
        if self.order >= 3 {
            for x in &self.d3[..sym3_len(d)] {
                m = m.max(x.abs());
            }
        }
        m
    }

    /// Largest absolute difference entry-by-entry (same dim/order assumed).
    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert_eq!(self.order, other.order);
        let d = self.dim;
        let mut m = (self.v - other.v).abs();
        if self.order >= 1 {
            for i in 0..d {
                m = m.max((self.d1[i] - other.d1[i]).abs());
            }
        }
        if self.order >= 2 {
            for i in 0..sym2_len(d) {
                m = m.max((self.d2[i] - other.d2[i]).abs());
            }
        }
        if self.order >= 3 {
            for i in 0..sym3_len(d) {
                m = m.max((self.d3[i] - other.d3[i]).abs());
            }
        }
        m
    }

    fn same_shape(&self, other: &Self) -> (usize, usize) {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert_eq!(self.order, other.order);
        (self.dim, self.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (d, order) = self.same_shape(other);
        let mut out = Jet3::constant(self.v + other.v, d, order);
        if order >= 1 {
            for i in 0..d {
                out.d1[i] = self.d1[i] + other.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..sym2_len(d) {
                out.d2[i] = self.d2[i] + other.d2[i];
            }
        }
        if order >= 3 {
            for i in 0..sym3_len(d) {
                out.d3[i] = self.d3[i] + other.d3[i];
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (d, order) = self.same_shape(other);
        let mut out = Jet3::constant(self.v - other.v, d, order);
        if order >= 1 {
            for i in 0..d {
                out.d1[i] = self.d1[i] - other.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..sym2_len(d) {
                out.d2[i] = self.d2[i] - other.d2[i];
            }
        }
        if order >= 3 {
            for i in 0..sym3_len(d) {
                out.d3[i] = self.d3[i] - other.d3[i];
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = *self;
        out.v = -out.v;
        for x in &mut out.d1 {
            *x = -*x;
        }
        for x in &mut out.d2 {
            *x = -*x;
        }
        for x in &mut out.d3 {
            *x = -*x;
        }
        out
    }

    /// Leibniz product rule through order 3.
    pub fn mul(&self, other: &Self) -> Self {
        let (d, order) = self.same_shape(other);
        let (u, w) = (self, other);
        let mut out = Jet3::constant(u.v * w.v, d, order);
        if order >= 1 {
            for i in 0..d {
                out.d1[i] = u.d1[i] * w.v + u.v * w.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..d {
                for j in i..d {
                    let ij = sym2_index(d, i, j);
                    out.d2[ij] =
                        u.d2[ij] * w.v + u.d1[i] * w.d1[j] + u.d1[j] * w.d1[i] + u.v * w.d2[ij];
                }
            }
        }
        if order >= 3 {
            for i in 0..d {
                for j in i..d {
                    for k in j..d {
                        let ijk = sym3_index(d, i, j, k);
                        let (ij, ik, jk) =
                            (sym2_index(d, i, j), sym2_index(d, i, k), sym2_index(d, j, k));
                        out.d3[ijk] = u.d3[ijk] * w.v
                            + u.d2[ij] * w.d1[k]
                            + u.d2[ik] * w.d1[j]
                            + u.d2[jk] * w.d1[i]
                            + u.d1[i] * w.d2[jk]
                            + u.d1[j] * w.d2[ik]
                            + u.d1[k] * w.d2[ij]
                            + u.v * w.d3[ijk];
                    }
                }
            }
        }
        out
    }

    /// Composition with a scalar function given its derivatives at the value:
    /// `phi = [φ(u), φ'(u), φ''(u), φ'''(u)]` (entries beyond `order` ignored).
    pub fn compose(&self, phi: [T; 4]) -> Self {
        let d = self.dim;
        let order = self.order;
        let u = self;
        let mut out = Jet3::constant(phi[0], d, order);
        if order >= 1 {
            for i in 0..d {
                out.d1[i] = phi[1] * u.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..d {
                for j in i..d {
                    let ij = sym2_index(d, i, j);
                    out.d2[ij] = phi[2] * u.d1[i] * u.d1[j] + phi[1] * u.d2[ij];
                }
            }
        }
        if order >= 3 {
            for i in 0..d {
                for j in i..d {
                    for k in j..d {
                        let ijk = sym3_index(d, i, j, k);
                        let (ij, ik, jk) =
                            (sym2_index(d, i, j), sym2_index(d, i, k), sym2_index(d, j, k));
                        out.d3[ijk] = phi[3] * u.d1[i] * u.d1[j] * u.d1[k]
                            + phi[2] * (u.d2[ij] * u.d1[k] + u.d2[ik] * u.d1[j] + u.d2[jk] * u.d1[i])
                            + phi[1] * u.d3[ijk];
                    }
                }
            }
        }
        out
    }

    /// `1 / u`. Caller must reject a zero value first.
    pub fn recip(&self) -> Self {
        let t = self.v;
        let r = T::one() / t;
        let r2 = r * r;
        let two = T::of(2.0);
        let six = T::of(6.0);
        self.compose([r, -r2, two * r2 * r, -six * r2 * r2])
    }

    /// Integer power by repeated multiplication (exact on polynomial jets).
    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet3::constant(T::one(), self.dim, self.order);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(v: f64, dim: usize, order: usize) -> Jet3<f64> {
        Jet3::constant(v, dim, order)
    }

    #[test]
    fn packed_indices_enumerate_sorted_tuples() {
        for d in 1..=3 {
            let mut idx = 0;
            for i in 0..d {
                for jj in i..d {
                    assert_eq!(sym2_index(d, i, jj), idx);
                    assert_eq!(sym2_index(d, jj, i), idx);
                    idx += 1;
                }
            }
            assert_eq!(idx, sym2_len(d));
            let mut idx = 0;
            for i in 0..d {
                for jj in i..d {
                    for k in jj..d {
                        assert_eq!(sym3_index(d, i, jj, k), idx);
                        assert_eq!(sym3_index(d, k, jj, i), idx);
                        assert_eq!(sym3_index(d, jj, k, i), idx);
                        idx += 1;
                    }
                }
            }
            assert_eq!(idx, sym3_len(d));
        }
    }

    #[test]
    fn square_of_variable() {
        let x = Jet3::variable(0, 3.0, 1, 2);
        let sq = x.mul(&x);
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.d1(0), 6.0);
        assert_eq!(sq.d2(0, 0), 2.0);
    }

    #[test]
    fn product_rule_third_order_cross_terms() {
        // u = x0*x1*x0 = x0^2 x1 in dim 2; d3(0,0,1) = 2 exactly
        let x0 = Jet3::variable(0, 1.5, 2, 3);
        let x1 = Jet3::variable(1, -2.0, 2, 3);
        let u = x0.mul(&x1).mul(&x0);
        assert_eq!(u.value(), 1.5 * 1.5 * -2.0);
        assert_eq!(u.d3(0, 0, 1), 2.0);
        assert_eq!(u.d3(0, 1, 0), 2.0);
        assert_eq!(u.d3(0, 0, 0), 0.0);
    }

    #[test]
    fn recip_matches_geometric_series() {
        // 1/(1-x) at 0 has unit derivatives 1, 1, 2, 6 (k! per order)
        let x = Jet3::variable(0, 0.0, 1, 3);
        let one = j(1.0, 1, 3);
        let r = one.sub(&x).recip();
        assert_eq!(r.value(), 1.0);
        assert_eq!(r.d1(0), 1.0);
        assert_eq!(r.d2(0, 0), 2.0);
        assert_eq!(r.d3(0, 0, 0), 6.0);
    }

    #[test]
    fn truncated_orders_skip_upper_blocks() {
        let x = Jet3::variable(0, 2.0, 2, 1);
        let y = x.mul(&x);
        assert_eq!(y.order(), 1);
        assert_eq!(y.d1(0), 4.0);
    }
}
