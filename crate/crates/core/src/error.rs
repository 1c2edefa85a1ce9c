use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate chain: q = r = 0 has no unique stationary distribution")]
    DegenerateChain,

    #[error("parameter `{name}` = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("not enough transitions to estimate the chain: {0}")]
    InsufficientData(&'static str),

    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value at position {position}")]
    NonFinite { position: usize },

    #[error("invalid bit {value:?} at position {position}")]
    InvalidBit { position: usize, value: char },

    #[error("position {position} out of range 1..={len}")]
    IndexOutOfRange { position: usize, len: usize },

    #[error("length {n} exceeds the exhaustive-enumeration limit of {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("chain is not reversible (detailed-balance residual {0:e})")]
    NotReversible(f64),

    #[error("invalid adversary: {0}")]
    Adversary(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: impl Into<f64>, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value: value.into(),
            domain,
        }
    }

    /// `true` for errors caused by caller-supplied values rather than the
    /// environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
