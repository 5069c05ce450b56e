//! The query language: syntax tree, parser, canonical printer and evaluator.

mod ast;
mod eval;
mod parser;
mod printer;

pub use ast::*;
pub use eval::{evaluate, EvalError};
pub use parser::{parse, ParseError, ParseErrorKind};
pub use printer::to_canonical_string;
