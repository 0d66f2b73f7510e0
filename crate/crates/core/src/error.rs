use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate rate entry {from} -> {to}")]
    DuplicateRate { from: String, to: String },
    #[error("negative rate {value} on {from} -> {to}")]
    NegativeRate {
        from: String,
        to: String,
        value: String,
    },
    #[error("invalid rate literal `{0}`")]
    InvalidRate(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("self-loop rate on `{0}`: the diagonal is always derived")]
    SelfLoop(String),
    #[error("class sets overlap on pair ({0}, {1})")]
    ClassOverlap(String, String),
    #[error("compartments do not partition the state set: {0}")]
    BadPartition(String),
    #[error("network needs at least two states")]
    TooFewStates,
    #[error("network has no class annotation")]
    MissingAnnotation,
    #[error("network has no compartment specification")]
    MissingCompartments,
    #[error("matrix is not Markovian: {0}")]
    NotMarkovian(String),
    #[error("generator is not ergodic: {0}")]
    NotErgodic(String),
    #[error("singular linear system")]
    Singular,
    #[error("state index {index} out of range for dimension {dim}")]
    StateOutOfRange { index: usize, dim: usize },
    #[error("states must differ, got ({0}, {0})")]
    SameState(usize),
    #[error("power {n} exceeds the limit {max}")]
    PowerTooLarge { n: usize, max: usize },
    #[error("time must be finite and nonnegative, got {0}")]
    BadTime(f64),
    #[error("uniformization needs {needed} terms, more than the limit {limit}; use a larger tail tolerance or a smaller time")]
    TruncationTooLarge { needed: usize, limit: usize },
    #[error("walk enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("time grid must contain at least {0} strictly positive times")]
    BadTimeGrid(usize),
    #[error("edge ({0}, {1}) is not in the support graph")]
    NotAnEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no simple path from {from} to {to} through edge ({p}, {q}); vertex {separator} separates them")]
    NoPath {
        from: usize,
        to: usize,
        p: usize,
        q: usize,
        separator: usize,
    },
    #[error("not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error("tree edge ({0}, {1}) has a zero rate in one direction")]
    OneWayTreeEdge(usize, usize),
    #[error("support graph is not symmetric: {0} -> {1} is positive but the reverse is zero")]
    AsymmetricSupport(usize, usize),
    #[error("perturbation infeasible: {0}")]
    Infeasible(String),
    #[error("pathwise detailed balance does not hold for ({0}, {1})")]
    PdbViolated(usize, usize),
    #[error("state {state} has zero exit rate at time {time}")]
    Absorbing { state: usize, time: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rebalancing did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for a failed validation,
    /// 4 for a numerical failure.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Syntax { .. } | DuplicateState(_) | DuplicateRate { .. } | NegativeRate { .. }
            | InvalidRate(_) | UnknownState(_) | SelfLoop(_) | ClassOverlap(..) | BadPartition(_)
            | TooFewStates | MissingAnnotation | MissingCompartments | StateOutOfRange { .. }
            | SameState(_) | BadTime(_) | BadTimeGrid(_) | InvalidArgument(_) | Io(_) => 2,
            NotMarkovian(_) | NotErgodic(_) | NotAnEdge(..) | Disconnected | NoPath { .. }
            | NotSpanningTree(_) | OneWayTreeEdge(..) | AsymmetricSupport(..) | PdbViolated(..)
            | Absorbing { .. } => 3,
            Singular | PowerTooLarge { .. } | TruncationTooLarge { .. } | GuardExceeded(_)
            | Infeasible(_) | NoConvergence(_) => 4,
        }
    }
}
