use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },

    #[error("model rejected:\n{0}")]
    Semantic(ValidationReport),

    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),

    #[error("unknown location `{0}`")]
    UnknownLocation(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("location `{0}` is not continuous")]
    NotContinuous(String),

    #[error("action `{action}` is not enabled at `{location}`")]
    DisabledAction { location: String, action: String },

    #[error("discrete locations form a cycle through `{0}`")]
    Cycle(String),

    #[error("game objective requires locations owned by both players")]
    GameOnSinglePlayer,

    #[error("operation requires a single-player model")]
    MultiPlayer,

    #[error("model is not uniform: exit rate {found} at `{location}` differs from {expected}")]
    NotUniform {
        location: String,
        found: f64,
        expected: f64,
    },

    #[error("target rate {target} is below the maximal exit rate {max}")]
    RateTooLow { target: f64, max: f64 },

    #[error("{what} count {count} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        count: u128,
        cap: u128,
    },

    #[error("time {t} is outside [0, {bound}]")]
    TimeOutOfRange { t: f64, bound: f64 },

    #[error("time bounds differ: {0} vs {1}")]
    TimeBoundMismatch(f64, f64),

    #[error("malformed scheduler: {0}")]
    MalformedScheduler(String),

    #[error("malformed scheduler artifact at line {line}: {message}")]
    MalformedArtifact { line: usize, message: String },

    #[error("invalid option: {0}")]
    InvalidOption(String),
}
