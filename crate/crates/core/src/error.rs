use thiserror::Error;

/// Errors raised while loading resources or running pipeline operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("sentence {sentence}: token {token} has an empty tag")]
    EmptyTag { sentence: usize, token: usize },

    #[error("{what} line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("probabilities for `{lhs}` sum to {sum}, expected 1")]
    ProbabilitySum { lhs: String, sum: f64 },

    #[error("unknown feature value `{value}` for {feature}")]
    UnknownFeature { feature: &'static str, value: String },

    #[error("index {index} out of range for sentence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("class `{0}` has no entry in the priors")]
    MissingPrior(String),

    #[error("class `{0}` has no entry in the pattern statistics")]
    MissingStat(String),

    #[error("class `{0}` is not in the inventory")]
    UnknownClass(String),

    #[error("class `{0}` cannot be realized by any synthesis template")]
    Unrealizable(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn format_err(what: &'static str, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        what,
        line,
        message: message.into(),
    }
}
