use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet must have at least one symbol")]
    EmptyAlphabet,

    #[error("alphabet of size {size} exceeds the limit {limit}; enable the large-alphabet override to allow it")]
    AlphabetTooLarge { size: usize, limit: usize },

    #[error("value {value} is outside [-1, 1] and cannot be grid-rounded")]
    OutOfRange { value: f64 },

    #[error("invalid token {token:?}: {reason} at position {position}")]
    InvalidToken {
        token: String,
        position: usize,
        reason: String,
    },

    #[error("sequence of length {length} is too short for scale {scale}")]
    SequenceTooShort { length: usize, scale: usize },

    #[error("corrupted trajectory at step {step}: recovered point matches no corner")]
    CorruptedTrajectory { step: usize },

    #[error("inconsistent k-mer stream at step {step}: consecutive tokens do not overlap")]
    InconsistentStream { step: usize },

    #[error("trajectory has no steps")]
    EmptyTrajectory,

    #[error("no embedding rows for id {id:?}")]
    EmptyEmbedding { id: String },

    #[error("feature width mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature blocks disagree on record order at id {id:?}")]
    Alignment { id: String },

    #[error("class {label:?} has no records")]
    DegenerateClass { label: String },

    #[error("training labels contain fewer than two classes")]
    DegenerateLabels,

    #[error("training diverged: loss became non-finite")]
    Divergence,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code convention: 1 for validation/domain errors, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}
