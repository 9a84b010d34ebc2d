//! The end-to-end pipeline: parse, reduce, print, solve.

use std::any::Any;
use std::thread;
use std::time::{Duration, Instant};

use adt_eager_core::frontend::{parse_script, print_uf_script, ParseError};
use adt_eager_core::oracle::{oracle_decide, OracleError, OracleOptions};
use adt_eager_core::preprocess::{desugar_ite, flatten};
use adt_eager_core::reduce::{reduce, ReduceError, ReduceOptions, ReduceStats};
use adt_eager_core::{Answer, Verdict};
use serde_json::json;
use thiserror::Error;

use crate::backend::{run_backend_within, BackendConfig, BackendError};

/// Stack for pipeline threads; deeply nested terms recurse in places.
pub const PIPELINE_STACK: usize = 256 << 20;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("frontend: {0}")]
    Parse(ParseError),
    #[error("reduce: {0}")]
    Reduce(ReduceError),
    #[error("backend: {0}")]
    Backend(BackendError),
    #[error("oracle: {0}")]
    Oracle(OracleError),
    #[error("internal error: {0}")]
    Internal(String),
}

macro_rules! wrap {
    ($($source:ty => $variant:ident),*) => {
        $(impl From<$source> for PipelineError {
            fn from(e: $source) -> Self {
                PipelineError::$variant(e)
            }
        })*
    };
}

wrap!(ParseError => Parse, ReduceError => Reduce, BackendError => Backend, OracleError => Oracle);

/// A reduced query.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// The datatype-free script as SMT-LIB text.
    pub text: String,
    /// `adt=k` lines.
    pub depths: String,
    pub stats: ReduceStats,
}

/// Runs `f` on a thread with [`PIPELINE_STACK`] bytes of stack.
pub fn with_large_stack<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    thread::scope(|s| {
        thread::Builder::new()
            .stack_size(PIPELINE_STACK)
            .spawn_scoped(s, f)
            .map_err(|e| PipelineError::Internal(format!("cannot start pipeline thread: {e}")))?
            .join()
            .map_err(|p| PipelineError::Internal(panic_message(p)))
    })
}

fn panic_message(p: Box<dyn Any + Send>) -> String {
    match p.downcast::<String>() {
        Ok(s) => *s,
        Err(p) => p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .unwrap_or_else(|| "panic".into()),
    }
}

/// Parses and reduces SMT-LIB text.
pub fn reduce_text(text: &str, opts: &ReduceOptions) -> Result<Reduction, PipelineError> {
    with_large_stack(|| {
        let script = parse_script(text)?;
        let flat = flatten(&desugar_ite(&script));
        let uf = reduce(&flat, opts)?;
        Ok(Reduction {
            text: print_uf_script(&uf.script),
            depths: uf.depths.render(&script.decls.adts),
            stats: uf.stats,
        })
    })?
}

/// Reduces `text` and hands the result to the backend. The time limit
/// covers both steps.
pub fn solve_text(
    text: &str,
    cfg: &BackendConfig,
    opts: &ReduceOptions,
) -> Result<(Verdict, Reduction), PipelineError> {
    let start = Instant::now();
    let reduction = reduce_text(text, opts)?;
    let remaining = cfg.timeout.saturating_sub(start.elapsed());
    let mut verdict = if remaining.is_zero() {
        Verdict {
            answer: Answer::Unknown("timeout".into()),
            elapsed: Duration::ZERO,
            source: cfg.name.clone(),
        }
    } else {
        run_backend_within(cfg, &reduction.text, remaining)?
    };
    verdict.elapsed = start.elapsed();
    Ok((verdict, reduction))
}

/// Decides `text` with the internal bounded search.
pub fn solve_with_oracle(text: &str, opts: &OracleOptions) -> Result<Verdict, PipelineError> {
    let start = Instant::now();
    let answer = with_large_stack(|| {
        let script = parse_script(text)?;
        let flat = flatten(&desugar_ite(&script));
        Ok::<_, PipelineError>(oracle_decide(&flat, opts)?.answer)
    })??;
    Ok(Verdict {
        answer,
        elapsed: start.elapsed(),
        source: "oracle".into(),
    })
}

pub fn stats_json(stats: &ReduceStats) -> serde_json::Value {
    json!({
        "variables": stats.variables,
        "skolems": stats.skolems,
        "rule-a": stats.rule_a,
        "rule-b": stats.rule_b,
        "axiom1": stats.axiom1,
        "axiom2": stats.axiom2,
        "axiom3": stats.axiom3,
        "universe-constants": stats.universe_constants,
    })
}
