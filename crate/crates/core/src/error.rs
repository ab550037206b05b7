use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{kind} id {id} out of range (declared {bound})")]
    IdOutOfRange {
        kind: &'static str,
        id: u64,
        bound: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("undefined precision: head matches no record")]
    UndefinedPrecision,

    #[error("split `{0}` would be empty")]
    EmptySplit(&'static str),

    /// No record carries uncovered weight; the learner treats this as a stop signal.
    #[error("every label occurrence reachable by the sampler is already covered")]
    FullyCovered,

    #[error("tail cannot be learned by pair sampling: {0}")]
    Unlearnable(&'static str),

    #[error("coupling from the past did not coalesce within {0} steps")]
    CftpTimeout(usize),

    #[error("clique enumeration exceeded the node budget of {0}")]
    NodeBudgetExceeded(usize),

    #[error("enumeration guard exceeded: {0}")]
    TooLarge(String),

    #[error("empty candidate pool for greedy head")]
    EmptyPool,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
