use thiserror::Error;

/// Errors surfaced by the protocol stack.
///
/// Honest-path algorithms never return errors; these cover malformed inputs,
/// arity mismatches and the explicit failure values the protocol distinguishes
/// (prover abort, simulation failure, decode failure).
#[derive(Debug, Error)]
pub enum Error {
    #[error("input arity mismatch: expected {expected} bits, got {got}")]
    InputArity { expected: usize, got: usize },

    #[error("malformed {what}: {reason}")]
    Malformed { what: &'static str, reason: String },

    #[error("circuit size {size} exceeds level bound {bound}")]
    LevelExceeded { size: u64, bound: u64 },

    #[error("ciphertext backend {got:#04x} does not match key backend {expected:#04x}")]
    BackendMismatch { expected: u8, got: u8 },

    #[error("decode failure: {0}")]
    DecodeFailure(String),

    #[error("extract failure: ciphertext outside the encryption support")]
    ExtractFailure,

    #[error("unknown relation id {0:#04x}")]
    UnknownRelation(u8),

    #[error("refusing to prove: witness does not satisfy the relation")]
    FalseWitness,

    #[error("oracle programming conflict on query of {0} bytes")]
    ProgrammingConflict(usize),

    #[error("unsupported backend: {0}")]
    UnsupportedBackend(&'static str),

    #[error("oracle query budget of {0} exhausted")]
    BudgetExhausted(u64),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn malformed(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Malformed {
            what,
            reason: reason.into(),
        }
    }
}
