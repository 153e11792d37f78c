use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
