use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("normalization error: a_1 = {0}, expected 1")]
    Normalization(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("range error: need {needed} coefficients, {available} available")]
    Range { needed: usize, available: usize },

    #[error("arity error: expected {expected} generator exponents, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state error: {0}")]
    State(String),

    #[error("resource error: {0}")]
    Resource(String),

    #[error("ill-defined character: {0}")]
    IllDefined(String),

    #[error("root number resolution failed: {0}")]
    Resolution(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("internal consistency defect: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
