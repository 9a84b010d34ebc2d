//! SMT-LIB 2.6 input and output.
//!
//! [`parse_script`] accepts the quantifier-free datatype fragment
//! (`QF_DT`, `QF_UFDT`) plus plain `QF_UF`; [`print_uf_script`] renders a
//! reduced query for an external solver; [`parse_backend_output`] reads
//! the solver's answer back.

mod output;
mod parse;
pub(crate) mod print;
pub mod sexp;

pub use output::parse_backend_output;
pub use parse::{parse_script, Script, RESERVED_PREFIX};
pub use print::{print_script, print_uf_script, quote_symbol, tester_name, write_term};

use alloc::string::String;
use thiserror::Error;

use sexp::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{}:{}: syntax error: {msg}", .span.line, .span.col)]
    Syntax { span: Span, msg: String },
    #[error("{}:{}: sort error in `{term}`: {msg}", .span.line, .span.col)]
    Sort {
        span: Span,
        term: String,
        msg: String,
    },
    #[error("{}:{}: unsupported feature: {feature}", .span.line, .span.col)]
    Unsupported { span: Span, feature: String },
    #[error("{}:{}: {msg}", .span.line, .span.col)]
    Declaration { span: Span, msg: String },
}

impl ParseError {
    pub(crate) fn syntax(span: Span, msg: &str) -> Self {
        ParseError::Syntax {
            span,
            msg: msg.into(),
        }
    }

    pub(crate) fn unsupported(span: Span, feature: &str) -> Self {
        ParseError::Unsupported {
            span,
            feature: feature.into(),
        }
    }

    pub(crate) fn declaration(span: Span, msg: String) -> Self {
        ParseError::Declaration { span, msg }
    }

    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::Sort { span, .. }
            | ParseError::Unsupported { span, .. }
            | ParseError::Declaration { span, .. } => *span,
        }
    }
}
