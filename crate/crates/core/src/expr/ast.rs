//! Expression trees over chart coordinates `x0..x{d-1}`.
//!
//! Nodes are reference-counted, so clones are cheap and sharing a subtree
//! across threads is safe. Trees are immutable after construction.

use std::fmt;
use std::sync::Arc;

use crate::real::Real;

/// Built-in scalar functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Tanh,
    /// `bump(t) = exp(1 - 1/(1-t^2))` for `|t| < 1`, identically 0 otherwise.
    Bump,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Bump => "bump",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            "bump" => Func::Bump,
            _ => return None,
        })
    }
}

#[derive(Debug)]
pub(crate) enum Node<T> {
    Const(T),
    Var(usize),
    Add(ExprAst<T>, ExprAst<T>),
    Sub(ExprAst<T>, ExprAst<T>),
    Mul(ExprAst<T>, ExprAst<T>),
    Div(ExprAst<T>, ExprAst<T>),
    Neg(ExprAst<T>),
    /// Integer exponent; negative handled through `recip`.
    PowI(ExprAst<T>, i32),
    /// Real exponent; requires a positive base at evaluation.
    PowF(ExprAst<T>, T),
    Call(Func, ExprAst<T>),
}

/// A closed scalar expression in the chart variables.
#[derive(Clone, Debug)]
pub struct ExprAst<T>(pub(crate) Arc<Node<T>>);

impl<T: Real> ExprAst<T> {
    pub fn constant(c: T) -> Self {
        ExprAst(Arc::new(Node::Const(c)))
    }

    pub fn var(i: usize) -> Self {
        ExprAst(Arc::new(Node::Var(i)))
    }

    pub fn add(self, rhs: Self) -> Self {
        ExprAst(Arc::new(Node::Add(self, rhs)))
    }

    pub fn sub(self, rhs: Self) -> Self {
        ExprAst(Arc::new(Node::Sub(self, rhs)))
    }

    pub fn mul(self, rhs: Self) -> Self {
        ExprAst(Arc::new(Node::Mul(self, rhs)))
    }

    pub fn div(self, rhs: Self) -> Self {
        ExprAst(Arc::new(Node::Div(self, rhs)))
    }

    pub fn neg(self) -> Self {
        ExprAst(Arc::new(Node::Neg(self)))
    }

    pub fn powi(self, n: i32) -> Self {
        ExprAst(Arc::new(Node::PowI(self, n)))
    }

    pub fn powf(self, a: T) -> Self {
        ExprAst(Arc::new(Node::PowF(self, a)))
    }

    pub fn call(func: Func, arg: Self) -> Self {
        ExprAst(Arc::new(Node::Call(func, arg)))
    }

    pub fn sin(self) -> Self {
        Self::call(Func::Sin, self)
    }

    pub fn cos(self) -> Self {
        Self::call(Func::Cos, self)
    }

    pub fn exp(self) -> Self {
        Self::call(Func::Exp, self)
    }

    pub fn bump(self) -> Self {
        Self::call(Func::Bump, self)
    }

    /// Structural pointer identity (same shared subtree).
    pub fn same_tree(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Smallest dimension this expression is valid in (1 + max variable index).
    pub fn min_dim(&self) -> usize {
        match &*self.0 {
            Node::Const(_) => 0,
            Node::Var(i) => i + 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.min_dim().max(b.min_dim())
            }
            Node::Neg(a) | Node::PowI(a, _) | Node::PowF(a, _) | Node::Call(_, a) => a.min_dim(),
        }
    }
}

impl<T: Real> fmt::Display for ExprAst<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{}", c),
            Node::Var(i) => write!(f, "x{}", i),
            Node::Add(a, b) => write!(f, "({} + {})", a, b),
            Node::Sub(a, b) => write!(f, "({} - {})", a, b),
            Node::Mul(a, b) => write!(f, "({} * {})", a, b),
            Node::Div(a, b) => write!(f, "({} / {})", a, b),
            Node::Neg(a) => write!(f, "(-{})", a),
            Node::PowI(a, n) => write!(f, "{}^{}", a, n),
            Node::PowF(a, x) => write!(f, "{}^{}", a, x),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}
