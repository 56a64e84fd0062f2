use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("invalid vertex name `{0}`")]
    BadName(String),
    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),
    #[error("vertex set is not dependent")]
    NotDependentSet,
    #[error("bad family parameters: {0}")]
    BadFamilyParams(String),
    #[error("bad word token `{0}`")]
    BadToken(String),
    #[error("rule {rule} not applicable at position {position}")]
    StepNotApplicable { rule: String, position: usize },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("contexts {0} and {1} are not weakly dependent")]
    NotWeaklyDependent(usize, usize),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("PDA and NFA input alphabets differ")]
    AlphabetMismatch,
    #[error("graph is not an anti-clique")]
    GraphNotAntiClique,
    #[error("graph does not have exactly one vertex")]
    GraphNotSingleton,
    #[error("vertices `{0}` and `{1}` are not adjacent")]
    VerticesNotAdjacent(String, String),
    #[error("graph unsuitable for gadget: {0}")]
    BadGadgetGraph(String),
    #[error("malformed gadget machine: {0}")]
    BadMachine(String),
    #[error("scope bound must be at least 1")]
    ZeroScopeBound,
    #[error("malformed instance: {0}")]
    BadInstance(String),
    #[error("malformed abstraction: {0}")]
    BadAbstraction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
