use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cost guard: {0}")]
    CostGuard(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
