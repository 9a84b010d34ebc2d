//! Blocks-world planning queries.
//!
//! A table has three places, each holding a (possibly empty) tower of
//! distinct blocks. A move takes the top block of one tower and puts it on
//! top of another. A query asks whether a target configuration is reachable
//! from an initial one in exactly (or at most) a given number of moves.
//!
//! Queries use four datatypes: the enumeration `block` (`B1`..`Bn`), the
//! inductive `tower` (`Empty | Stack(top, rest)`), the record `config`
//! (`table(l, c, r)`) and the enumeration `place` (`Left | Center | Right`)
//! for the per-step source and destination choices.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::frontend::{parse_script, Script};
use crate::ir::{AdtSignature, NormalTerm};
use crate::Answer;

pub const MIN_BLOCKS: usize = 2;
pub const MAX_BLOCKS: usize = 26;
/// Largest block count [`search_oracle`] explores by default.
pub const DEFAULT_SEARCH_BLOCKS: usize = 6;

const PLACES: [&str; 3] = ["Left", "Center", "Right"];
const FIELDS: [&str; 3] = ["l", "c", "r"];

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BlocksError {
    #[error("block count {0} outside {MIN_BLOCKS}..={MAX_BLOCKS}")]
    BlockCount(usize),
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("state search limited to {limit} blocks, setup has {blocks}")]
    TooLarge { blocks: usize, limit: usize },
}

/// Three towers, each listed bottom to top. Blocks are numbered from 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub towers: [Vec<u8>; 3],
}

/// Move the top block of tower `from` onto tower `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub from: usize,
    pub to: usize,
}

impl Config {
    /// Every block `0..n` appears exactly once.
    pub fn is_valid(&self, n: usize) -> bool {
        let mut seen = alloc::vec![false; n];
        for &b in self.towers.iter().flatten() {
            let b = b as usize;
            if b >= n || core::mem::replace(&mut seen[b], true) {
                return false;
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn apply(&self, m: Move) -> Option<Config> {
        if m.from == m.to || m.from > 2 || m.to > 2 {
            return None;
        }
        let mut next = self.clone();
        let b = next.towers[m.from].pop()?;
        next.towers[m.to].push(b);
        Some(next)
    }

    pub fn successors(&self) -> impl Iterator<Item = (Move, Config)> + '_ {
        (0..3)
            .flat_map(|from| (0..3).map(move |to| Move { from, to }))
            .filter_map(|m| self.apply(m).map(|c| (m, c)))
    }

    /// `(table t_l t_c t_r)` with blocks named `B1`..`Bn`.
    pub fn to_smt(&self) -> String {
        let mut out = String::from("(table");
        for tower in &self.towers {
            out.push(' ');
            out.push_str(&tower_smt(tower));
        }
        out.push(')');
        out
    }
}

fn tower_smt(tower: &[u8]) -> String {
    let mut out = String::new();
    for &b in tower.iter().rev() {
        let _ = write!(out, "(Stack {} ", block_name(b));
    }
    out.push_str("Empty");
    for _ in tower {
        out.push(')');
    }
    out
}

pub fn block_name(b: u8) -> String {
    format!("B{}", b as usize + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlocksSetup {
    pub block_count: usize,
    pub initial: Config,
    pub target: Config,
    pub seed: u64,
}

/// Two blocks: `B2` on `B1` on the left; the target has `B1` alone in the
/// center and `B2` on the left. The shortest plan has three moves.
pub fn example_setup() -> BlocksSetup {
    BlocksSetup {
        block_count: 2,
        initial: Config {
            towers: [alloc::vec![0, 1], Vec::new(), Vec::new()],
        },
        target: Config {
            towers: [alloc::vec![1], alloc::vec![0], Vec::new()],
        },
        seed: 0,
    }
}

/// Samples both configurations with ChaCha8 seeded by `seed`: blocks are
/// shuffled, then each is put on top of a uniformly chosen place.
pub fn generate_setup(block_count: usize, seed: u64) -> Result<BlocksSetup, BlocksError> {
    if !(MIN_BLOCKS..=MAX_BLOCKS).contains(&block_count) {
        return Err(BlocksError::BlockCount(block_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = random_config(&mut rng, block_count);
    let target = random_config(&mut rng, block_count);
    Ok(BlocksSetup {
        block_count,
        initial,
        target,
        seed,
    })
}

fn random_config(rng: &mut ChaCha8Rng, n: usize) -> Config {
    let mut order: Vec<u8> = (0..n as u8).collect();
    order.shuffle(rng);
    let mut config = Config::default();
    for b in order {
        let place = rng.random_range(0..3u32) as usize;
        config.towers[place].push(b);
    }
    config
}

/// Whether the target must be reached after exactly `steps` moves or after
/// at most that many.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Horizon {
    #[default]
    Exactly,
    AtMost,
}

#[derive(Clone, Debug)]
pub struct BlocksQuery {
    pub setup: BlocksSetup,
    pub steps: usize,
    pub horizon: Horizon,
    /// The query as generated.
    pub text: String,
    pub script: Script,
}

/// The query as SMT-LIB text. States are `s0`..`s{steps}`; move `i` takes
/// the top of place `src{i}` onto place `dst{i}`.
pub fn encode_text(setup: &BlocksSetup, steps: usize, horizon: Horizon) -> Result<String, BlocksError> {
    if steps == 0 {
        return Err(BlocksError::NoSteps);
    }
    let mut out = String::new();
    let blocks: Vec<String> = (0..setup.block_count as u8)
        .map(|b| format!("({})", block_name(b)))
        .collect();
    let _ = writeln!(out, "(set-logic QF_DT)");
    let _ = writeln!(out, "(declare-datatypes ((block 0) (tower 0) (config 0) (place 0))");
    let _ = writeln!(out, "  (({})", blocks.join(" "));
    let _ = writeln!(out, "   ((Empty) (Stack (top block) (rest tower)))");
    let _ = writeln!(out, "   ((table (l tower) (c tower) (r tower)))");
    let _ = writeln!(out, "   ((Left) (Center) (Right))))");
    for i in 0..=steps {
        let _ = writeln!(out, "(declare-const s{i} config)");
    }
    for i in 0..steps {
        let _ = writeln!(out, "(declare-const src{i} place)");
        let _ = writeln!(out, "(declare-const dst{i} place)");
    }
    let _ = writeln!(out, "(assert (= s0 {}))", setup.initial.to_smt());
    for i in 0..steps {
        let (s, t) = (format!("s{i}"), format!("s{}", i + 1));
        let _ = writeln!(out, "(assert (not (= src{i} dst{i})))");
        for from in 0..3 {
            for to in (0..3).filter(|&to| to != from) {
                let other = 3 - from - to;
                let (f, g, o) = (FIELDS[from], FIELDS[to], FIELDS[other]);
                let _ = writeln!(
                    out,
                    "(assert (=> (and (= src{i} {}) (= dst{i} {}))\n  \
                     (and ((_ is Stack) ({f} {s})) (= ({f} {t}) (rest ({f} {s})))\n       \
                     (= ({g} {t}) (Stack (top ({f} {s})) ({g} {s}))) (= ({o} {t}) ({o} {s})))))",
                    PLACES[from], PLACES[to],
                );
            }
        }
    }
    let target = setup.target.to_smt();
    match horizon {
        Horizon::Exactly => {
            let _ = writeln!(out, "(assert (= s{steps} {target}))");
        }
        Horizon::AtMost => {
            let goals: Vec<String> = (0..=steps).map(|i| format!("(= s{i} {target})")).collect();
            let _ = writeln!(out, "(assert (or {}))", goals.join(" "));
        }
    }
    let _ = writeln!(out, "(check-sat)");
    Ok(out)
}

pub fn encode_query(setup: &BlocksSetup, steps: usize) -> Result<BlocksQuery, BlocksError> {
    encode_query_with(setup, steps, Horizon::Exactly)
}

pub fn encode_query_with(setup: &BlocksSetup, steps: usize, horizon: Horizon) -> Result<BlocksQuery, BlocksError> {
    let text = encode_text(setup, steps, horizon)?;
    let script = parse_script(&text).expect("generated queries parse");
    Ok(BlocksQuery {
        setup: setup.clone(),
        steps,
        horizon,
        text,
        script,
    })
}

/// Exact-length reachability by breadth-first search over configurations.
pub fn search_oracle(setup: &BlocksSetup, steps: usize) -> Result<Answer, BlocksError> {
    search_oracle_with(setup, steps, Horizon::Exactly, DEFAULT_SEARCH_BLOCKS)
}

pub fn search_oracle_with(
    setup: &BlocksSetup,
    steps: usize,
    horizon: Horizon,
    max_blocks: usize,
) -> Result<Answer, BlocksError> {
    if setup.block_count > max_blocks {
        return Err(BlocksError::TooLarge {
            blocks: setup.block_count,
            limit: max_blocks,
        });
    }
    let mut layer: BTreeSet<Config> = BTreeSet::new();
    layer.insert(setup.initial.clone());
    let mut hit = layer.contains(&setup.target);
    for _ in 0..steps {
        layer = layer
            .iter()
            .flat_map(|c| c.successors().map(|(_, n)| n).collect::<Vec<_>>())
            .collect();
        hit = match horizon {
            Horizon::Exactly => layer.contains(&setup.target),
            Horizon::AtMost => hit || layer.contains(&setup.target),
        };
    }
    Ok(if hit { Answer::Sat } else { Answer::Unsat })
}

/// Whether `states` starts at the initial configuration, ends at the
/// target, and consecutive states differ by one legal move.
pub fn replay(setup: &BlocksSetup, states: &[Config]) -> bool {
    let (Some(first), Some(last)) = (states.first(), states.last()) else {
        return false;
    };
    *first == setup.initial
        && *last == setup.target
        && states
            .windows(2)
            .all(|w| w[0].successors().any(|(_, n)| n == w[1]))
}

/// Reads a `config` value back, if it is a valid configuration.
pub fn config_from_value(sig: &AdtSignature, value: &NormalTerm) -> Option<Config> {
    let NormalTerm::App(table, towers) = value else {
        return None;
    };
    if sig.ctor(*table).name != "table" || towers.len() != 3 {
        return None;
    }
    let mut config = Config::default();
    for (slot, mut t) in config.towers.iter_mut().zip(towers) {
        let mut top_down = Vec::new();
        loop {
            let NormalTerm::App(c, args) = t else {
                return None;
            };
            match sig.ctor(*c).name.as_str() {
                "Empty" => break,
                "Stack" => {
                    let NormalTerm::App(b, _) = &args[0] else {
                        return None;
                    };
                    let n: u8 = sig.ctor(*b).name.strip_prefix('B')?.parse().ok()?;
                    top_down.push(n.checked_sub(1)?);
                    t = &args[1];
                }
                _ => return None,
            }
        }
        top_down.reverse();
        *slot = top_down;
    }
    Some(config)
}

/// One generated query of a suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteEntry {
    pub file: String,
    pub blocks: usize,
    pub steps: usize,
    pub seed: u64,
}

/// Most step counts sampled per setup.
pub const STEPS_PER_SETUP: u32 = 4;

/// Samples `count` queries with ChaCha8 seeded by `seed`. Each setup draws
/// a block count uniformly from `2..=26` and a setup seed, then between 1
/// and [`STEPS_PER_SETUP`] distinct step counts uniformly from
/// `1..=2·blocks`.
pub fn generate_suite(count: usize, seed: u64) -> Vec<(SuiteEntry, BlocksQuery)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let blocks = rng.random_range(MIN_BLOCKS as u32..=MAX_BLOCKS as u32) as usize;
        let setup_seed = rng.next_u64();
        let setup = generate_setup(blocks, setup_seed).expect("block count in range");
        let mut candidates: Vec<usize> = (1..=2 * blocks).collect();
        candidates.shuffle(&mut rng);
        let take = rng.random_range(1..=STEPS_PER_SETUP) as usize;
        let mut chosen: Vec<usize> = candidates.into_iter().take(take).collect();
        chosen.sort_unstable();
        for steps in chosen {
            if out.len() == count {
                break;
            }
            let entry = SuiteEntry {
                file: format!("bw-{:04}-b{blocks}-s{steps}.smt2", out.len()),
                blocks,
                steps,
                seed: setup_seed,
            };
            let query = encode_query(&setup, steps).expect("steps are positive");
            out.push((entry, query));
        }
    }
    out
}

#[cfg(test)]
mod tests;
