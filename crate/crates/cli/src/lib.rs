//! Process-level pieces around `adt-eager-core`: running external solvers,
//! the end-to-end pipeline, benchmarking, and suite files.

pub mod backend;
pub mod harness;
pub mod pipeline;
pub mod suite;

pub use adt_eager_core as core;
