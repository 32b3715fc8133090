//! Scalar expression language and manifold definition documents.

mod ast;
mod manifold;
mod parser;

pub use ast::{BinOp, Constant, Func, Node, ScalarExpr};
pub(crate) use ast::check_domain;
pub use manifold::{parse_manifold, Chart, ManifoldSpec, TorseData, DEFAULT_INTERVAL};
pub use parser::parse_expr;
