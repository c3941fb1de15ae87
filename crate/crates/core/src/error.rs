use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} = {value} (limit {limit})")]
    Capacity {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("zero search incomplete in [{lo}, {hi}]: found {found} zeros, expected {expected}")]
    Incomplete {
        lo: f64,
        hi: f64,
        found: usize,
        expected: usize,
    },

    #[error("insufficient zero data: need height {needed}, list complete to {available}")]
    InsufficientData { needed: f64, available: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no almost period found below {bound} (grid step {step:e}); grid may be too coarse")]
    NotFound { bound: f64, step: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
