use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input data.
    Input,
    /// A configured budget ran out or an instance has no solution.
    Budget,
    /// An internal invariant was violated.
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    UnknownNode(String),
    DuplicateNode(String),
    SelfLoop(String),
    CyclicGraph,
    EmptyDataset,
    /// A dataset graph failed validation.
    InvalidGraph {
        graph_index: usize,
        reason: String,
    },
    InvalidVocabulary(String),
    InvalidGrammar(String),
    /// The rule applied at `step` does not match the nonterminal it rewrites.
    LabelMismatch {
        step: usize,
        expected: String,
        found: String,
    },
    UnknownRule(usize),
    NoNonterminal {
        step: usize,
    },
    MultipleNonterminals {
        step: usize,
        count: usize,
    },
    RemainingNonterminal,
    EmptyDerivation,
    /// Every candidate rule was masked while sampling.
    DeadEnd {
        step: usize,
    },
    StepLimit(usize),
    ExactCliqueTooLarge {
        nodes: usize,
        cap: usize,
    },
    Infeasible {
        graph_index: Option<usize>,
    },
    EnumerationBudget(String),
    IterationBudget {
        unresolved: Vec<usize>,
    },
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DeadEnd { .. }
            | Error::StepLimit(_)
            | Error::ExactCliqueTooLarge { .. }
            | Error::Infeasible { .. }
            | Error::EnumerationBudget(_)
            | Error::IterationBudget { .. } => ErrorKind::Budget,
            Error::MultipleNonterminals { .. } | Error::Invariant(_) => ErrorKind::Internal,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownNode(id) => write!(f, "unknown node `{id}`"),
            Error::DuplicateNode(id) => write!(f, "duplicate node `{id}`"),
            Error::SelfLoop(id) => write!(f, "self-loop on node `{id}`"),
            Error::CyclicGraph => write!(f, "graph contains a directed cycle"),
            Error::EmptyDataset => write!(f, "dataset is empty"),
            Error::InvalidGraph { graph_index, reason } => {
                write!(f, "graph {graph_index}: {reason}")
            }
            Error::InvalidVocabulary(msg) => write!(f, "invalid label vocabulary: {msg}"),
            Error::InvalidGrammar(msg) => write!(f, "invalid grammar: {msg}"),
            Error::LabelMismatch { step, expected, found } => write!(
                f,
                "step {step}: rule expects nonterminal `{expected}` but the current nonterminal is `{found}`"
            ),
            Error::UnknownRule(id) => write!(f, "unknown rule id {id}"),
            Error::NoNonterminal { step } => {
                write!(f, "step {step}: no nonterminal left to rewrite")
            }
            Error::MultipleNonterminals { step, count } => {
                write!(f, "step {step}: intermediate graph has {count} nonterminals")
            }
            Error::RemainingNonterminal => {
                write!(f, "derivation ended with a nonterminal still present")
            }
            Error::EmptyDerivation => write!(f, "derivation is empty"),
            Error::DeadEnd { step } => write!(f, "sampling dead end at step {step}: every rule is masked"),
            Error::StepLimit(n) => write!(f, "derivation exceeded {n} steps"),
            Error::ExactCliqueTooLarge { nodes, cap } => write!(
                f,
                "exact max clique on {nodes} nodes exceeds the cap of {cap}; use the approx or greedy tier"
            ),
            Error::Infeasible { graph_index: Some(i) } => {
                write!(f, "infeasible hitting-set instance (graph {i})")
            }
            Error::Infeasible { graph_index: None } => {
                write!(f, "infeasible hitting-set instance (empty set)")
            }
            Error::EnumerationBudget(msg) => write!(f, "derivation enumeration budget exceeded: {msg}"),
            Error::IterationBudget { unresolved } => write!(
                f,
                "induction iteration budget exceeded; unresolved graphs: {unresolved:?}"
            ),
            Error::Invariant(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
