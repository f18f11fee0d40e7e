use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// The variants are grouped by the exit-code class the command-line front end
/// maps them to (see [`Error::class`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsafe variables {variables:?} in rule `{rule}`")]
    Unsafe { rule: String, variables: Vec<String> },
    #[error("predicate `{predicate}` used with arities {first} and {second}")]
    ArityClash {
        predicate: String,
        first: usize,
        second: usize,
    },
    #[error("program is not head-cycle free: {first} and {second} share a head and a positive cycle")]
    HeadCycleDetected { first: String, second: String },
    #[error("predicate `{predicate}` collides with reserved prefix `{prefix}`")]
    ReservedPrefixCollision { predicate: String, prefix: String },

    #[error("QDIMACS input has no quantifier lines")]
    EmptyPrefix,
    #[error("partition error: {0}")]
    Partition(String),
    #[error("graph has no vertex partition")]
    MissingPartition,
    #[error("reified program references undeclared id `{id}`")]
    DanglingReference { id: String },
    #[error("reified program declares `{id}` twice")]
    DuplicateId { id: String },
    #[error("quantifier prefix `{found}` does not match the expected shape `{expected}`")]
    PrefixShape { expected: String, found: String },
    #[error("clause {clause} has {width} literals, at most {max} are supported")]
    ClauseTooWide { clause: usize, width: usize, max: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("no bag covers the variables {0:?}")]
    NoCoveringBag(Vec<String>),
    #[error("no bag covers the body element `{0}`")]
    UncoveredAtom(String),
    #[error("variable {0} cannot be bound by a positive atom or an arithmetic chain")]
    UnsecurableVariable(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("unsupported aggregate: {0}")]
    UnsupportedAggregate(String),

    #[error("grounding exceeded {limit} ground rules")]
    GroundingLimitExceeded { limit: usize },
    #[error("{count} undetermined atoms exceed the limit of {limit}")]
    TooManyAtoms { count: usize, limit: usize },
    #[error("{count} variables exceed the limit of {limit}")]
    TooManyVars { count: usize, limit: usize },
    #[error("{count} vertices exceed the limit of {limit}")]
    TooManyVertices { count: usize, limit: usize },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or unsafe input text.
    Input,
    /// Well-formed input that the requested operation cannot accept.
    Semantic,
    /// A resource cap was hit.
    Limit,
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Syntax { .. } | Unsafe { .. } | ArityClash { .. } | DanglingReference { .. } | DuplicateId { .. } => {
                ErrorClass::Input
            }
            GroundingLimitExceeded { .. } | TooManyAtoms { .. } | TooManyVars { .. } | TooManyVertices { .. } => {
                ErrorClass::Limit
            }
            _ => ErrorClass::Semantic,
        }
    }
}
