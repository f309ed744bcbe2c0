//! Jet evaluation of expression trees.

use super::ast::{ExprAst, Func, Node};
use super::error::ExprError;
use super::jet::Jet3;
use crate::real::Real;

/// Evaluate `e` at the point `p`, carrying partial derivatives up to `order`.
///
/// All differentiation is exact forward-mode arithmetic on the composed
/// elementary functions; the only error sources are rounding and genuine
/// domain violations (division by zero, `log` of a non-positive value, ...),
/// which are reported together with the offending subexpression.
pub fn eval_jet<T: Real>(e: &ExprAst<T>, p: &[T], order: usize) -> Result<Jet3<T>, ExprError> {
    assert!(order <= 3, "jet order is capped at 3");
    let dim = p.len();
    assert!(dim >= 1 && dim <= super::jet::MAX_DIM);
    let jet = eval_node(e, p, dim, order)?;
    if !jet.all_finite() {
        return Err(domain(e, "non-finite result"));
    }
    Ok(jet)
}

fn domain<T: Real>(e: &ExprAst<T>, reason: &str) -> ExprError {
    ExprError::Domain {
        subexpr: format!("{}", e),
        reason: reason.to_string(),
    }
}

fn eval_node<T: Real>(
    e: &ExprAst<T>,
    p: &[T],
    dim: usize,
    order: usize,
) -> Result<Jet3<T>, ExprError> {
    Ok(match &*e.0 {
        Node::Const(c) => Jet3::constant(*c, dim, order),
        Node::Var(i) => {
            debug_assert!(*i < dim, "variable index out of range (parser enforces this)");
            Jet3::variable(*i, p[*i], dim, order)
        }
        Node::Add(a, b) => eval_node(a, p, dim, order)?.add(&eval_node(b, p, dim, order)?),
        Node::Sub(a, b) => eval_node(a, p, dim, order)?.sub(&eval_node(b, p, dim, order)?),
        Node::Mul(a, b) => eval_node(a, p, dim, order)?.mul(&eval_node(b, p, dim, order)?),
        Node::Div(a, b) => {
            let den = eval_node(b, p, dim, order)?;
            if den.value() == T::zero() {
                return Err(domain(e, "division by zero"));
            }
            eval_node(a, p, dim, order)?.mul(&den.recip())
        }
        Node::Neg(a) => eval_node(a, p, dim, order)?.neg(),
        Node::PowI(a, n) => {
            let base = eval_node(a, p, dim, order)?;
            if *n >= 0 {
                base.powi(*n as u32)
            } else {
                if base.value() == T::zero() {
                    return Err(domain(e, "zero base with negative exponent"));
                }
                base.powi((-n) as u32).recip()
            }
        }
        Node::PowF(a, x) => {
            let base = eval_node(a, p, dim, order)?;
            let t = base.value();
            if t <= T::zero() {
                return Err(domain(e, "non-positive base with real exponent"));
            }
            let v = t.powf(*x);
            let d1 = *x * t.powf(*x - T::one());
            let d2 = *x * (*x - T::one()) * t.powf(*x - T::of(2.0));
            let d3 = *x * (*x - T::one()) * (*x - T::of(2.0)) * t.powf(*x - T::of(3.0));
            base.compose([v, d1, d2, d3])
        }
        Node::Call(func, a) => {
            let u = eval_node(a, p, dim, order)?;
            let t = u.value();
            match func {
                Func::Sin => {
                    let (s, c) = (t.sin(), t.cos());
                    u.compose([s, c, -s, -c])
                }
                Func::Cos => {
                    let (s, c) = (t.sin(), t.cos());
                    u.compose([c, -s, -c, s])
                }
                Func::Tan => {
                    let v = t.tan();
                    let s = T::one() + v * v; // sec^2
                    let two = T::of(2.0);
                    let six = T::of(6.0);
                    u.compose([v, s, two * v * s, s * (two + six * v * v)])
                }
                Func::Exp => {
                    let v = t.exp();
                    u.compose([v, v, v, v])
                }
                Func::Log => {
                    if t <= T::zero() {
                        return Err(domain(e, "log of non-positive value"));
                    }
                    let r = T::one() / t;
                    u.compose([t.ln(), r, -r * r, T::of(2.0) * r * r * r])
                }
                Func::Sqrt => {
                    if t < T::zero() || (t == T::zero() && order >= 1) {
                        return Err(domain(e, "sqrt outside its smooth domain"));
                    }
                    let v = t.sqrt();
                    let half = T::of(0.5);
                    let d1 = half / v;
                    let d2 = -half * half / (v * t);
                    let d3 = T::of(0.375) / (v * t * t);
                    u.compose([v, d1, d2, d3])
                }
                Func::Tanh => {
                    let v = t.tanh();
                    let s = T::one() - v * v; // sech^2
                    let two = T::of(2.0);
                    let four = T::of(4.0);
                    u.compose([v, s, -two * v * s, s * (four * v * v - two * s)])
                }
                Func::Bump => bump_jet(&u, dim, order),
            }
        }
    })
}

/// `bump(u) = exp(1 - 1/(1 - u^2))` inside `|u| < 1`, exactly zero outside.
///
/// Inside the support it is assembled from jet arithmetic, so derivatives are
/// exact; at and beyond the support boundary every order is an exact zero.
fn bump_jet<T: Real>(u: &Jet3<T>, dim: usize, order: usize) -> Jet3<T> {
    if u.value().abs() >= T::one() {
        return Jet3::constant(T::zero(), dim, order);
    }
    let one = Jet3::constant(T::one(), dim, order);
    let s = one.sub(&u.mul(u));
    let w = one.sub(&s.recip());
    let ew = w.value().exp();
    w.compose([ew, ew, ew, ew])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn e(text: &str, dim: usize) -> ExprAst<f64> {
        parse_expr(text, dim, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn square_at_three() {
        let jet = eval_jet(&e("x0*x0", 1), &[3.0], 2).unwrap();
        assert_eq!(jet.value(), 9.0);
        assert_eq!(jet.d1(0), 6.0);
        assert_eq!(jet.d2(0, 0), 2.0);
    }

    #[test]
    fn sine_maclaurin_at_zero() {
        let jet = eval_jet(&e("sin(x0)", 1), &[0.0], 3).unwrap();
        assert_eq!(jet.value(), 0.0);
        assert_eq!(jet.d1(0), 1.0);
        assert_eq!(jet.d2(0, 0), 0.0);
        assert_eq!(jet.d3(0, 0, 0), -1.0);
    }

    #[test]
    fn composed_exponential_matches_finite_differences() {
        let expr = e("exp(sin(x0))", 1);
        let x = 0.7;
        let h = 1e-3;
        let jet = eval_jet(&expr, &[x], 3).unwrap();
        let at = |x: f64| eval_jet(&expr, &[x], 0).unwrap().value();
        let fd1 = (at(x + h) - at(x - h)) / (2.0 * h);
        let fd2 = (at(x + h) - 2.0 * at(x) + at(x - h)) / (h * h);
        let fd3 = (at(x + 2.0 * h) - 2.0 * at(x + h) + 2.0 * at(x - h) - at(x - 2.0 * h))
            / (2.0 * h * h * h);
        assert_relative_eq!(jet.d1(0), fd1, max_relative = 1e-6);
        assert_relative_eq!(jet.d2(0, 0), fd2, max_relative = 1e-6);
        assert_relative_eq!(jet.d3(0, 0, 0), fd3, max_relative = 1e-4);
    }

    #[test]
    fn pole_reports_domain_error() {
        let expr = e("1/(1-x0)", 1);
        match eval_jet(&expr, &[1.0], 1) {
            Err(ExprError::Domain { reason, .. }) => assert!(reason.contains("zero")),
            other => panic!("expected domain error, got {:?}", other),
        }
    }

    #[test]
    fn bump_vanishes_identically_outside_support() {
        let expr = e("bump((x0*x0+x1*x1)/0.81)", 2);
        for p in [[0.9, 0.0], [1.0, 1.0], [0.7, 0.7]] {
            let jet = eval_jet(&expr, &p, 3).unwrap();
            assert_eq!(jet.max_abs(), 0.0, "at {:?}", p);
        }
        // strictly inside: positive value
        let jet = eval_jet(&expr, &[0.1, 0.2], 3).unwrap();
        assert!(jet.value() > 0.0);
    }

    #[test]
    fn bump_decays_to_zero_at_support_edge() {
        let expr = e("bump(x0)", 1);
        let mut prev = f64::MAX;
        for t in [0.9, 0.99, 0.999, 0.9999] {
            let jet = eval_jet(&expr, &[t], 3).unwrap();
            assert!(jet.max_abs() <= prev.max(1e-10));
            prev = jet.max_abs();
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn real_exponent_requires_positive_base() {
        let expr = e("x0^0.5", 1);
        assert!(eval_jet(&expr, &[4.0], 2).is_ok());
        assert!(matches!(
            eval_jet(&expr, &[-1.0], 2),
            Err(ExprError::Domain { .. })
        ));
    }
}
