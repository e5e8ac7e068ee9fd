use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cutoff {cutoff} leaves tail mass {tail:.3e} above tolerance {tol:.1e}; use cutoff >= {required}")]
    CutoffTooSmall { cutoff: usize, tail: f64, tol: f64, required: usize },

    #[error("ladder window |k| <= {k_max} leaks {leakage:.3e} of probability (tolerance {tol:.1e})")]
    Leakage { k_max: usize, leakage: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ill-posed inversion: {0}")]
    IllPosed(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit status used by the CLI: 2 configuration, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::CutoffTooSmall { .. } => 2,
            Error::Leakage { .. } | Error::Numerical(_) | Error::IllPosed(_) => 3,
            Error::Io(_) | Error::Format(_) => 4,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
