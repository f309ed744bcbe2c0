//! Expression front end: parsing and third-order jet evaluation.

mod ast;
mod error;
mod eval;
mod jet;
mod parse;

pub use ast::{ExprAst, Func};
pub use error::ExprError;
pub use eval::eval_jet;
pub use jet::{sym2_index, sym2_len, sym3_index, sym3_len, Jet3, MAX_DIM};
pub use parse::parse_expr;
