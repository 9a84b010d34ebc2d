//! Benchmark runs, CSV records and disagreement checks.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use adt_eager_core::rank::{ContributionReport, RunRecord};
use adt_eager_core::reduce::ReduceOptions;
use adt_eager_core::Answer;
use serde::Deserialize;
use thiserror::Error;

use crate::backend::{run_backend_on_file, BackendConfig, BackendError};
use crate::pipeline::{solve_text, PipelineError};

/// Per-query limit used when none is given.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(1200);

pub const CSV_HEADER: [&str; 5] = ["query", "solver", "verdict", "seconds", "timeout"];

/// How a solver receives each query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reduce to uninterpreted functions first.
    #[default]
    Reduce,
    /// Pass the original file.
    Direct,
}

/// One entry of a solver configuration file.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct SolverSpec {
    pub name: String,
    pub command: String,
    #[serde(default)]
    pub mode: Mode,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Backend(#[from] BackendError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: unknown verdict `{verdict}`")]
    Verdict { line: u64, verdict: String },
    #[error("duplicate solver name `{0}`")]
    DuplicateSolver(String),
    #[error("no solvers configured")]
    NoSolvers,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_owned(),
        source,
    }
}

pub fn load_solvers(path: &Path) -> Result<Vec<SolverSpec>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Config {
        path: path.to_owned(),
        source,
    })
}

/// `.smt2` files directly inside `dir`, sorted by name.
pub fn query_files(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "smt2") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Queries where some solver answered `sat` and another `unsat`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub query: String,
    pub sat: Vec<String>,
    pub unsat: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    /// Sorted by query, then solver.
    pub records: Vec<RunRecord>,
    pub disagreements: Vec<Disagreement>,
}

/// Runs every solver on every query, `jobs` runs at a time.
pub fn bench(
    dir: &Path,
    solvers: &[SolverSpec],
    timeout: Duration,
    jobs: usize,
) -> Result<BenchOutcome, HarnessError> {
    if solvers.is_empty() {
        return Err(HarnessError::NoSolvers);
    }
    let mut configs = Vec::with_capacity(solvers.len());
    for s in solvers {
        if configs.iter().any(|(c, _): &(BackendConfig, Mode)| c.name == s.name) {
            return Err(HarnessError::DuplicateSolver(s.name.clone()));
        }
        configs.push((BackendConfig::new(&s.name, &s.command, timeout)?, s.mode));
    }
    let files = query_files(dir)?;
    let tasks: Vec<(usize, usize)> = (0..files.len())
        .flat_map(|q| (0..configs.len()).map(move |s| (q, s)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<RunRecord, HarnessError>>> = Mutex::new(Vec::with_capacity(tasks.len()));
    thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(tasks.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(q, s)) = tasks.get(i) else {
                    break;
                };
                let (cfg, mode) = &configs[s];
                let record = run_one(dir, &files[q], cfg, *mode);
                results.lock().expect("collector").push(record);
            });
        }
    });
    let mut records = results
        .into_inner()
        .expect("collector")
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by(|a, b| (&a.query, &a.solver).cmp(&(&b.query, &b.solver)));
    let disagreements = disagreements(&records);
    Ok(BenchOutcome { records, disagreements })
}

fn run_one(dir: &Path, file: &Path, cfg: &BackendConfig, mode: Mode) -> Result<RunRecord, HarnessError> {
    let query = file
        .strip_prefix(dir)
        .unwrap_or(file)
        .to_string_lossy()
        .into_owned();
    let start = Instant::now();
    let answer = match mode {
        Mode::Direct => run_backend_on_file(cfg, file, cfg.timeout)?.answer,
        Mode::Reduce => match fs::read_to_string(file) {
            Err(e) => Answer::Unknown(format!("error: {e}")),
            Ok(text) => match solve_text(&text, cfg, &ReduceOptions::default()) {
                Ok((v, _)) => v.answer,
                Err(PipelineError::Backend(e @ BackendError::Spawn { .. })) => return Err(e.into()),
                Err(e) => Answer::Unknown(format!("error: {e}")),
            },
        },
    };
    let seconds = start.elapsed().as_secs_f64();
    let timeout = answer == Answer::Unknown("timeout".into());
    Ok(RunRecord {
        query,
        solver: cfg.name.clone(),
        answer,
        seconds,
        timeout,
    })
}

pub fn disagreements(records: &[RunRecord]) -> Vec<Disagreement> {
    let mut by_query: BTreeMap<&str, (Vec<String>, Vec<String>)> = BTreeMap::new();
    for r in records {
        let entry = by_query.entry(&r.query).or_default();
        match r.answer {
            Answer::Sat => entry.0.push(r.solver.clone()),
            Answer::Unsat => entry.1.push(r.solver.clone()),
            Answer::Unknown(_) => {}
        }
    }
    by_query
        .into_iter()
        .filter(|(_, (sat, unsat))| !sat.is_empty() && !unsat.is_empty())
        .map(|(q, (sat, unsat))| Disagreement {
            query: q.to_string(),
            sat,
            unsat,
        })
        .collect()
}

pub fn write_csv<W: io::Write>(records: &[RunRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.query.as_str(),
            r.solver.as_str(),
            r.answer.word(),
            &format!("{:.3}", r.seconds),
            if r.timeout { "true" } else { "false" },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RunRecord>, HarnessError> {
    #[derive(Deserialize)]
    struct Row {
        query: String,
        solver: String,
        verdict: String,
        seconds: f64,
        timeout: bool,
    }
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        let answer = match row.verdict.as_str() {
            "sat" => Answer::Sat,
            "unsat" => Answer::Unsat,
            "unknown" if row.timeout => Answer::Unknown("timeout".into()),
            "unknown" => Answer::Unknown("unknown".into()),
            other => {
                return Err(HarnessError::Verdict {
                    line: out.len() as u64 + 2,
                    verdict: other.into(),
                })
            }
        };
        out.push(RunRecord {
            query: row.query,
            solver: row.solver,
            answer,
            seconds: row.seconds,
            timeout: row.timeout,
        });
    }
    Ok(out)
}

/// A fixed-width table, one row per solver in rank order.
pub fn render_report(report: &ContributionReport) -> String {
    let width = report
        .rows
        .iter()
        .map(|r| r.solver.len())
        .max()
        .unwrap_or(0)
        .max("solver".len());
    let mut out = format!(
        "{:<4} {:<width$} {:>7} {:>8} {:>8} {:>11} {:>12}\n",
        "rank", "solver", "solved", "solved%", "vb-with", "vb-without", "contribution"
    );
    for (i, r) in report.rows.iter().enumerate() {
        out.push_str(&format!(
            "{:<4} {:<width$} {:>7} {:>8.2} {:>8} {:>11} {:>12}\n",
            i + 1,
            r.solver,
            r.solved,
            r.solved_pct,
            r.vb_with,
            r.vb_without,
            r.contribution()
        ));
    }
    out
}
