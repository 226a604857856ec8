use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("arity mismatch at line {line}: left side has {lhs} symbols, right side has {rhs}")]
    Arity { line: usize, lhs: usize, rhs: usize },
    #[error("dialect violation at line {line}: {message}")]
    Dialect { line: usize, message: String },
    #[error("problem has no query line")]
    MissingQuery,
    #[error("second query at line {line}; a problem has exactly one query")]
    DuplicateQuery { line: usize },
    #[error("variable `{0}` is not in the team's universe")]
    UnknownVariable(String),
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("constructed counterexample failed verification: {0}")]
    WitnessVerificationFailed(String),
    #[error("`{0}` holds in every team satisfying the assumptions but has no derivation")]
    Underivable(String),
    #[error("every consistent constant sequence is covered; the query is derivable by B3")]
    CoverageComplete,
    #[error("no catalogue team refutes {0}")]
    CatalogueGap(String),
    #[error("DIMACS error at line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("team format error at line {line}: {message}")]
    TeamFormat { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
