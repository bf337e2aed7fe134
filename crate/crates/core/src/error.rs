use thiserror::Error;

use crate::exactla::LinalgError;
use crate::model::Violation;

/// Errors returned by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("invalid automaton: {}", join(.0))]
    InvalidAutomaton(Vec<Violation>),
    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("counter value {counter} exceeds the bound {bound}")]
    CounterOutOfRange { counter: usize, bound: usize },
    #[error("unknown counter state index {0}")]
    UnknownCounterState(usize),
    #[error("resource cap exceeded: {what} needs {requested}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        requested: String,
        cap: usize,
    },
    #[error("deadline exceeded")]
    DeadlineExceeded,
    #[error("automaton is not counter-deterministic: {0}")]
    NotCounterDeterministic(String),
    #[error("boolean automaton is not deterministic")]
    NotDeterministic,
    #[error("{0}")]
    Format(String),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
