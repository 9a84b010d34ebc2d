//! Decides quantifier-free queries over algebraic data types by reducing
//! them eagerly to equisatisfiable queries over uninterpreted functions.
//!
//! The pipeline is [`frontend::parse_script`] → [`preprocess::desugar_ite`]
//! → [`preprocess::flatten`] → [`reduce::reduce`] →
//! [`frontend::print_uf_script`]; the resulting text can be handed to any
//! solver that supports `QF_UF`. [`oracle`] decides small pure-datatype
//! queries by bounded search, [`blocksworld`] generates planning
//! benchmarks, and [`rank`] scores solvers by virtual-best contribution.

#![no_std]

extern crate alloc;

pub mod blocksworld;
pub mod depth;
pub mod frontend;
pub mod ir;
pub mod oracle;
pub mod preprocess;
pub mod random;
pub mod rank;
pub mod reduce;
pub mod verdict;

pub use verdict::{Answer, Verdict};
