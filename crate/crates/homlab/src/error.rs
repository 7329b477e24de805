use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graphs are limited to {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("no edge {0}-{1}")]
    MissingEdge(usize, usize),
    #[error("pebble {0} is not part of the alphabet")]
    UnknownPebble(String),
    #[error("invalid pebble alphabet ({k1},{k2}): need k1 + k2 >= 1")]
    EmptyAlphabet { k1: usize, k2: usize },
    #[error("label {0} of the pattern is not assigned in the target")]
    MissingLabel(String),
    #[error("relation {name} has arity {arity}, tuple {tuple:?} does not fit")]
    BadTuple { name: String, arity: usize, tuple: Vec<usize> },
    #[error("base graph must be connected")]
    Disconnected,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("formula outside the required fragment: {0}")]
    Fragment(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("singular linear system")]
    Singular,
    #[error("search budget exhausted")]
    Budget,
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown suite {name}; available: {}", available.join(", "))]
    UnknownSuite { name: String, available: Vec<String> },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
