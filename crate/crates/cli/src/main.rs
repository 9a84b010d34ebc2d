use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use adt_eager::backend::BackendConfig;
use adt_eager::harness::{self, DEFAULT_TIMEOUT};
use adt_eager::pipeline::{reduce_text, solve_text, solve_with_oracle, stats_json, Reduction};
use adt_eager::suite::write_suite;
use adt_eager_core::blocksworld::{encode_text, generate_setup, Horizon};
use adt_eager_core::oracle::OracleOptions;
use adt_eager_core::rank::contribution_rank;
use adt_eager_core::reduce::{ReduceOptions, DEFAULT_AXIOM3_CAP, DEFAULT_UNIVERSE_CAP};
use adt_eager_core::Answer;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

/// Decide quantifier-free algebraic datatype queries through uninterpreted
/// functions.
#[derive(Parser)]
#[command(name = "adt-eager", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a query and decide it with a backend solver.
    Solve {
        file: PathBuf,
        /// Backend command; the query path replaces `{file}` or is appended.
        /// Defaults to $ADT_EAGER_BACKEND, else `z3`.
        #[arg(long)]
        backend: Option<String>,
        /// Seconds before the backend is killed.
        #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
        timeout: f64,
        /// Decide with the internal bounded search instead of a backend.
        #[arg(long, conflicts_with_all = ["dump_depths", "dump_stats"])]
        oracle: bool,
        #[command(flatten)]
        reduce: ReduceArgs,
    },
    /// Reduce a query to a datatype-free one.
    Reduce {
        file: PathBuf,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        reduce: ReduceArgs,
    },
    /// Run solvers over a directory of queries.
    Bench {
        dir: PathBuf,
        /// JSON list of {name, command, mode} with mode `reduce` or `direct`.
        #[arg(long)]
        solvers: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
        timeout: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// CSV output; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank solvers by virtual-best contribution.
    Rank { results: PathBuf },
    /// Write one blocks-world query.
    GenBlocksworld {
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ask for at most `steps` moves instead of exactly.
        #[arg(long)]
        at_most: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a suite of blocks-world queries and its manifest.
    GenSuite {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'd', long)]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct ReduceArgs {
    /// Print `adt=k` depth bounds to standard error.
    #[arg(long)]
    dump_depths: bool,
    /// Print reduction counts as JSON to standard error.
    #[arg(long)]
    dump_stats: bool,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_CAP)]
    universe_cap: usize,
    #[arg(long, default_value_t = DEFAULT_AXIOM3_CAP)]
    axiom3_cap: usize,
    #[arg(long, hide = true)]
    no_acyclicality: bool,
}

impl ReduceArgs {
    fn options(&self) -> ReduceOptions {
        ReduceOptions {
            universe_cap: self.universe_cap,
            axiom3_cap: self.axiom3_cap,
            acyclicality: !self.no_acyclicality,
        }
    }

    fn dump(&self, r: &Reduction) {
        if self.dump_depths {
            eprint!("{}", r.depths);
        }
        if self.dump_stats {
            eprintln!("{}", stats_json(&r.stats));
        }
    }
}

fn seconds(s: f64) -> Result<Duration> {
    if !(s.is_finite() && s > 0.0) {
        bail!("timeout must be a positive number of seconds");
    }
    Ok(Duration::from_secs_f64(s))
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Solve {
            file,
            backend,
            timeout,
            oracle,
            reduce,
        } => {
            let text = read(&file)?;
            let verdict = if oracle {
                solve_with_oracle(&text, &OracleOptions::default())?
            } else {
                let cfg = BackendConfig::resolve(backend.as_deref(), seconds(timeout)?)?;
                let (verdict, reduction) = solve_text(&text, &cfg, &reduce.options())?;
                reduce.dump(&reduction);
                verdict
            };
            println!("{}", verdict.answer);
            if let Answer::Unknown(reason) = &verdict.answer {
                eprintln!("reason: {reason}");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reduce { file, output, reduce } => {
            let text = read(&file)?;
            let reduction = reduce_text(&text, &reduce.options())?;
            reduce.dump(&reduction);
            write_out(output.as_ref(), &reduction.text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench {
            dir,
            solvers,
            timeout,
            jobs,
            output,
        } => {
            let specs = harness::load_solvers(&solvers)?;
            let outcome = harness::bench(&dir, &specs, seconds(timeout)?, jobs)?;
            let mut csv = Vec::new();
            harness::write_csv(&outcome.records, &mut csv)?;
            write_out(output.as_ref(), &String::from_utf8(csv)?)?;
            if outcome.disagreements.is_empty() {
                return Ok(ExitCode::SUCCESS);
            }
            for d in &outcome.disagreements {
                eprintln!(
                    "fatal: disagreement on {}: sat from {}, unsat from {}",
                    d.query,
                    d.sat.join(","),
                    d.unsat.join(",")
                );
            }
            Ok(ExitCode::FAILURE)
        }
        Cmd::Rank { results } => {
            let file = fs::File::open(&results).with_context(|| format!("cannot read {}", results.display()))?;
            let records = harness::read_csv(file)?;
            let report = contribution_rank(&records)?;
            print!("{}", harness::render_report(&report));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::GenBlocksworld {
            blocks,
            steps,
            seed,
            at_most,
            output,
        } => {
            let setup = generate_setup(blocks, seed)?;
            let horizon = if at_most { Horizon::AtMost } else { Horizon::Exactly };
            write_out(output.as_ref(), &encode_text(&setup, steps, horizon)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::GenSuite { count, seed, dir } => {
            let manifest = write_suite(&dir, count, seed).with_context(|| format!("cannot write {}", dir.display()))?;
            eprintln!("wrote {} queries to {}", manifest.len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// The error chain joined by `: `, skipping causes already in the text.
fn render_error(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", render_error(&e));
            ExitCode::FAILURE
        }
    }
}
