use thiserror::Error;

/// Errors raised by the model layer and simulators.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Requested a system outside the study catalog (n, k, or variant).
    #[error("unsupported system configuration: {0}")]
    UnsupportedSystem(String),

    /// A probability row does not sum to one or has negative entries.
    #[error("invalid stochastic row in {context}: {detail}")]
    InvalidDistribution { context: String, detail: String },

    /// Bayes update conditioned on an observation of probability zero.
    #[error("degenerate observation: Pr(o={observation} | b, a={action}) = 0")]
    DegenerateObservation { action: usize, observation: usize },

    /// Episode stepped past its truncation limit.
    #[error("step after truncation: t = {t} >= limit {limit}")]
    StepAfterTruncation { t: usize, limit: usize },

    /// Joint-table construction would exceed the table-size guard.
    #[error("flattening guard: n = {n} components exceeds the supported maximum of {max}")]
    TooManyComponents { n: usize, max: usize },

    /// Configuration file failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
