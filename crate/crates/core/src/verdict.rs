//! Solver answers.

use alloc::string::String;
use core::fmt;
use core::time::Duration;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Sat,
    Unsat,
    /// Undecided, with the reason (`timeout`, `bound`, solver output, …).
    Unknown(String),
}

impl Answer {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Answer::Unknown(_))
    }

    /// `sat`, `unsat` or `unknown`.
    pub fn word(&self) -> &'static str {
        match self {
            Answer::Sat => "sat",
            Answer::Unsat => "unsat",
            Answer::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

/// An answer together with how long it took and who produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub elapsed: Duration,
    /// Backend label, or `oracle`.
    pub source: String,
}
