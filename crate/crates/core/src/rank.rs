//! Virtual-best contribution ranking.
//!
//! The virtual best of a solver set solves a query when any member does.
//! A solver's contribution is how many queries the virtual best loses when
//! that solver is removed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::Answer;

/// One solver run on one query.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub query: String,
    pub solver: String,
    pub answer: Answer,
    pub seconds: f64,
    pub timeout: bool,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.answer.is_decided()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContributionRow {
    pub solver: String,
    pub solved: usize,
    /// Share of queries solved, in percent.
    pub solved_pct: f64,
    pub vb_with: usize,
    pub vb_without: usize,
}

impl ContributionRow {
    pub fn contribution(&self) -> usize {
        self.vb_with - self.vb_without
    }
}

/// Rows in rank order.
#[derive(Clone, Debug, PartialEq)]
pub struct ContributionReport {
    pub queries: usize,
    pub rows: Vec<ContributionRow>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("no run records")]
    Empty,
    #[error("solver {solver} ran {found} queries, expected {expected}")]
    MismatchedQueries {
        solver: String,
        found: usize,
        expected: usize,
    },
    #[error("solver {solver} ran query {query} more than once")]
    Duplicate { solver: String, query: String },
}

/// Ranks solvers by contribution, then solved count (both descending), then
/// label.
pub fn contribution_rank(records: &[RunRecord]) -> Result<ContributionReport, RankError> {
    let mut by_solver: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for r in records {
        let runs = by_solver.entry(&r.solver).or_default();
        if runs.insert(&r.query, r.solved()).is_some() {
            return Err(RankError::Duplicate {
                solver: r.solver.clone(),
                query: r.query.clone(),
            });
        }
    }
    let queries: BTreeSet<&str> = records.iter().map(|r| r.query.as_str()).collect();
    if queries.is_empty() {
        return Err(RankError::Empty);
    }
    for (solver, runs) in &by_solver {
        if runs.len() != queries.len() {
            return Err(RankError::MismatchedQueries {
                solver: String::from(*solver),
                found: runs.len(),
                expected: queries.len(),
            });
        }
    }
    let solved_by = |q: &str, skip: Option<&str>| {
        by_solver
            .iter()
            .any(|(s, runs)| Some(*s) != skip && runs[q])
    };
    let vb_with = queries.iter().filter(|q| solved_by(q, None)).count();
    let mut rows: Vec<ContributionRow> = by_solver
        .iter()
        .map(|(solver, runs)| {
            let solved = runs.values().filter(|&&s| s).count();
            ContributionRow {
                solver: String::from(*solver),
                solved,
                solved_pct: 100.0 * solved as f64 / queries.len() as f64,
                vb_with,
                vb_without: queries.iter().filter(|q| solved_by(q, Some(solver))).count(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.contribution()
            .cmp(&a.contribution())
            .then(b.solved.cmp(&a.solved))
            .then_with(|| a.solver.cmp(&b.solver))
    });
    Ok(ContributionReport {
        queries: queries.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(query: &str, solver: &str, answer: Answer) -> RunRecord {
        RunRecord {
            query: query.into(),
            solver: solver.into(),
            answer,
            seconds: 0.1,
            timeout: false,
        }
    }

    fn unknown() -> Answer {
        Answer::Unknown("timeout".into())
    }

    #[test]
    fn single_solver() {
        let records: Vec<_> = (0..5)
            .map(|i| rec(&alloc::format!("q{i}"), "s", if i < 3 { Answer::Sat } else { unknown() }))
            .collect();
        let r = contribution_rank(&records).unwrap();
        assert_eq!(r.rows[0].vb_with, 3);
        assert_eq!(r.rows[0].vb_without, 0);
        assert_eq!(r.rows[0].solved_pct, 60.0);
    }

    #[test]
    fn disjoint_solvers_each_contribute_one() {
        let records = [
            rec("a", "x", Answer::Sat),
            rec("b", "x", unknown()),
            rec("a", "y", unknown()),
            rec("b", "y", Answer::Unsat),
        ];
        let r = contribution_rank(&records).unwrap();
        for row in &r.rows {
            assert_eq!((row.vb_with, row.vb_without), (2, 1));
        }
        assert_eq!(r.rows[0].solver, "x");
    }

    #[test]
    fn overlapping_solvers() {
        let records = [
            rec("q1", "B", unknown()),
            rec("q2", "B", Answer::Sat),
            rec("q1", "A", Answer::Unsat),
            rec("q2", "A", Answer::Sat),
        ];
        let r = contribution_rank(&records).unwrap();
        assert_eq!(r.rows[0].solver, "A");
        assert_eq!((r.rows[0].vb_with, r.rows[0].vb_without), (2, 1));
        assert_eq!((r.rows[1].vb_with, r.rows[1].vb_without), (2, 2));
    }

    #[test]
    fn mismatched_and_duplicate_records() {
        let records = [rec("q1", "A", Answer::Sat), rec("q2", "A", Answer::Sat), rec("q1", "B", Answer::Sat)];
        assert!(matches!(
            contribution_rank(&records),
            Err(RankError::MismatchedQueries { .. })
        ));
        let records = [rec("q1", "A", Answer::Sat), rec("q1", "A", Answer::Sat)];
        assert!(matches!(contribution_rank(&records), Err(RankError::Duplicate { .. })));
        assert_eq!(contribution_rank(&[]), Err(RankError::Empty));
    }
}
