use thiserror::Error;

/// Errors from parsing or evaluating expressions.
#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdent { name: String, pos: usize },

    #[error("wrong arity for `{name}` at byte {pos}: expected 1 argument")]
    Arity { name: String, pos: usize },

    #[error("exponent at byte {pos} is not a constant expression")]
    NonConstantExponent { pos: usize },

    #[error("domain violation in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
}
