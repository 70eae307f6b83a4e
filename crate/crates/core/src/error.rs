use thiserror::Error;

/// Structural problems with a tournament or its text encoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("tournament must have at least one vertex")]
    Empty,
    #[error("{n} vertices exceeds the configured cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("diagonal entry set at vertex {0}")]
    Diagonal(usize),
    #[error("antisymmetry violated: both ({u},{v}) and ({v},{u}) present")]
    BothDirections { u: usize, v: usize },
    #[error("completeness violated: neither ({u},{v}) nor ({v},{u}) present")]
    Missing { u: usize, v: usize },
    #[error("TRN1 line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The best-effort procedure could not complete with the degree or
    /// connectivity the instance provides. Not a bug.
    #[error("hypothesis exhausted at stage `{stage}`: {reason}")]
    HypothesisExhausted { stage: &'static str, reason: String },
    #[error("search budget of {budget} expansions exceeded")]
    ResourceLimit { budget: u64 },
    #[error("{found} close branch vertices exceed the limit {limit}")]
    CountViolation { found: usize, limit: usize },
    #[error("claim {claim} violated at rewrite fixed point: {detail}")]
    ClaimViolation { claim: &'static str, detail: String },
    #[error("rewrite `{rule}` did not decrease the potential")]
    PotentialNotDecreasing { rule: &'static str },
    #[error("verification failed: {0}")]
    Verification(#[from] Violation),
    #[error("bound recursion too large to evaluate exactly ({bits} bits exceeds cap)")]
    BoundTooLarge { bits: u64 },
}

impl Error {
    pub(crate) fn exhausted(stage: &'static str, reason: impl Into<String>) -> Self {
        Error::HypothesisExhausted {
            stage,
            reason: reason.into(),
        }
    }

    pub fn is_hypothesis_exhausted(&self) -> bool {
        matches!(self, Error::HypothesisExhausted { .. })
    }
}

/// A clause of a structural invariant that an object failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("path {path} is empty")]
    EmptyPath { path: String },
    #[error("path {path}: ({from},{to}) is not an edge")]
    NotAnEdge { path: String, from: usize, to: usize },
    #[error("path {path} repeats vertex {vertex}")]
    RepeatedVertex { path: String, vertex: usize },
    #[error("path {path}: vertex {vertex} out of range")]
    OutOfRange { path: String, vertex: usize },
    #[error("path {path} has wrong endpoints: {detail}")]
    Endpoint { path: String, detail: String },
    #[error("disjointness: vertex {vertex} shared by {first} and {second}")]
    Disjointness {
        vertex: usize,
        first: String,
        second: String,
    },
    #[error("path {path} touches forbidden vertex {vertex} ({why})")]
    Forbidden {
        path: String,
        vertex: usize,
        why: &'static str,
    },
    #[error("minimality: path {path} has forward chord {from}->{to}")]
    ForwardChord { path: String, from: usize, to: usize },
    #[error("branch pair ({u},{v}): expected exactly one length-1 path, found {found}")]
    PairLength { u: usize, v: usize, found: usize },
    #[error("structure incomplete: {0}")]
    Incomplete(String),
    #[error("{0}")]
    Other(String),
}
