//! Recursive-descent parser for the chart expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' exponent)?        exponent := factor, constant-valued
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' factor
//! ```
//!
//! Identifiers are `x0..x9` (bounded by the declared dimension), declared
//! parameter names (substituted as constants at parse time) and the built-in
//! function names.

use std::collections::BTreeMap;

use super::ast::{ExprAst, Func, Node};
use super::error::ExprError;
use crate::real::Real;

/// Parse `text` as an expression in `dim` variables. Parameters are resolved
/// to their values immediately; the resulting tree has no symbols left.
pub fn parse_expr<T: Real>(
    text: &str,
    dim: usize,
    params: &BTreeMap<String, T>,
) -> Result<ExprAst<T>, ExprError> {
    assert!(dim >= 1, "dim must be at least 1");
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim,
        params,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(ExprError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ExprError::Syntax {
            pos: p.pos,
            msg: format!("unexpected character `{}`", p.src[p.pos] as char),
        });
    }
    Ok(e)
}

struct Parser<'a, T> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    params: &'a BTreeMap<String, T>,
}

impl<T: Real> Parser<'_, T> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ExprError::Syntax {
                pos: self.pos,
                msg: format!("expected `{}`", c as char),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprAst<T>, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs.add(self.term()?);
            } else if self.eat(b'-') {
                lhs = lhs.sub(self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst<T>, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs.mul(self.factor()?);
            } else if self.eat(b'/') {
                lhs = lhs.div(self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst<T>, ExprError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let epos = self.pos;
            let exponent = self.factor()?;
            let value =
                const_value(&exponent).ok_or(ExprError::NonConstantExponent { pos: epos })?;
            let rounded = value.round();
            let as_int = rounded.to_i32();
            if value == rounded && as_int.is_some() && rounded.abs() <= T::of(64.0) {
                Ok(base.powi(as_int.unwrap()))
            } else {
                Ok(base.powf(value))
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<ExprAst<T>, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(ExprError::Syntax {
                pos: self.pos,
                msg: format!("unexpected character `{}`", c as char),
            }),
            None => Err(ExprError::Syntax {
                pos: self.pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn number(&mut self) -> Result<ExprAst<T>, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // not an exponent suffix; backtrack (e.g. `2e` where `e` is an ident)
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
            pos: start,
            msg: format!("invalid number `{}`", text),
        })?;
        Ok(ExprAst::constant(T::of(value)))
    }

    fn ident(&mut self) -> Result<ExprAst<T>, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();

        if self.peek() == Some(b'(') {
            let func = Func::from_name(&name).ok_or_else(|| ExprError::UnknownIdent {
                name: name.clone(),
                pos: start,
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(ExprAst::call(func, arg));
        }

        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if rest.len() == 1 {
                    return if i < self.dim {
                        Ok(ExprAst::var(i))
                    } else {
                        Err(ExprError::UnknownIdent { name, pos: start })
                    };
                }
            }
        }
        if let Some(v) = self.params.get(&name) {
            return Ok(ExprAst::constant(*v));
        }
        if Func::from_name(&name).is_some() {
            return Err(ExprError::Arity { name, pos: start });
        }
        Err(ExprError::UnknownIdent { name, pos: start })
    }
}

/// Value of a variable-free subtree, if it is one.
fn const_value<T: Real>(e: &ExprAst<T>) -> Option<T> {
    match &*e.0 {
        Node::Const(c) => Some(*c),
        Node::Var(_) => None,
        Node::Add(a, b) => Some(const_value(a)? + const_value(b)?),
        Node::Sub(a, b) => Some(const_value(a)? - const_value(b)?),
        Node::Mul(a, b) => Some(const_value(a)? * const_value(b)?),
        Node::Div(a, b) => Some(const_value(a)? / const_value(b)?),
        Node::Neg(a) => Some(-const_value(a)?),
        Node::PowI(a, n) => Some(const_value(a)?.powi(*n)),
        Node::PowF(a, x) => Some(const_value(a)?.powf(*x)),
        Node::Call(_, _) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, dim: usize) -> Result<ExprAst<f64>, ExprError> {
        parse_expr(text, dim, &BTreeMap::new())
    }

    #[test]
    fn product_of_trig_factors() {
        let e = parse("sin(x0)*cos(x1)", 2).unwrap();
        assert!(matches!(&*e.0, Node::Mul(_, _)));
    }

    #[test]
    fn pole_expression_parses() {
        let e = parse("1/(1-x0)", 1).unwrap();
        assert!(matches!(&*e.0, Node::Div(_, _)));
    }

    #[test]
    fn bump_with_nested_argument() {
        let e = parse("bump((x0*x0+x1*x1)/0.81)", 2).unwrap();
        assert!(matches!(&*e.0, Node::Call(Func::Bump, _)));
    }

    #[test]
    fn precedence_and_unary_minus() {
        // -x0^2 parses as -(x0^2); 1+2*3 keeps product tighter
        let e = parse("-x0^2 + 1 + 2*x0", 1).unwrap();
        assert_eq!(format!("{}", e), "(((-x0^2) + 1) + (2 * x0))");
    }

    #[test]
    fn parameters_become_constants() {
        let mut params = BTreeMap::new();
        params.insert("omega".to_string(), 2.5f64);
        let e = parse_expr("sin(omega*x0)", 1, &params).unwrap();
        assert_eq!(format!("{}", e), "sin((2.5 * x0))");
    }

    #[test]
    fn errors_carry_positions() {
        match parse("sin(x0", 1) {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("expected syntax error, got {:?}", other),
        }
        match parse("x0 + y", 1) {
            Err(ExprError::UnknownIdent { name, pos }) => {
                assert_eq!(name, "y");
                assert_eq!(pos, 5);
            }
            other => panic!("expected unknown ident, got {:?}", other),
        }
        match parse("x3", 2) {
            Err(ExprError::UnknownIdent { name, .. }) => assert_eq!(name, "x3"),
            other => panic!("expected unknown ident, got {:?}", other),
        }
        match parse("sin + 1", 1) {
            Err(ExprError::Arity { name, .. }) => assert_eq!(name, "sin"),
            other => panic!("expected arity error, got {:?}", other),
        }
    }

    #[test]
    fn exponents_fold_to_constants() {
        let e = parse("x0^(1+1)", 1).unwrap();
        assert!(matches!(&*e.0, Node::PowI(_, 2)));
        let e = parse("x0^0.5", 1).unwrap();
        assert!(matches!(&*e.0, Node::PowF(_, _)));
        assert!(matches!(
            parse("x0^x0", 1),
            Err(ExprError::NonConstantExponent { .. })
        ));
    }
}
