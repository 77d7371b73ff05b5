use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("element index {index} out of range for a group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },

    #[error("group enumeration exceeded the order cap of {cap}")]
    OrderCapExceeded { cap: usize },

    #[error("multiplication table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("subgroups belong to different parent groups")]
    ParentMismatch,

    #[error("set is not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("centralizer lattice exceeded the node cap of {cap} ({found} nodes found)")]
    NodeCapExceeded { cap: usize, found: usize },

    #[error("witness set of size {size} exceeds the bound {bound}")]
    BoundViolated { size: usize, bound: usize },

    #[error("subgroup is not nilpotent")]
    NotNilpotent,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("formula expects {expected} parameters, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("formula has free variable `{0}` (only `x` may be free)")]
    FreeVariable(String),

    #[error("unknown catalog group `{0}`")]
    UnknownCatalog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
