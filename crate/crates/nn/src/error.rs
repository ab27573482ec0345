use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: expected {expected}, got {got} ({context})")]
    ShapeMismatch {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    #[error("container entry not found: {0}")]
    MissingEntry(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
