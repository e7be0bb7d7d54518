use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("threshold constants are not defined for (r, k) = ({r}, {k})")]
    UnsupportedModel { r: usize, k: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("density {c} is below the critical density {c_crit}; no core is predicted")]
    Subcritical { c: f64, c_crit: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("vertex {0} lies in the core")]
    CoreVertex(u32),

    #[error("trace does not match the hypergraph: {0}")]
    Mismatch(String),

    #[error("core assignment violates core equation {edge}")]
    CoreEquationViolated { edge: u32 },

    #[error("size guard: {0}")]
    Guard(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
