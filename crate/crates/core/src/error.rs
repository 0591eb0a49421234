use thiserror::Error;

/// Errors raised by state, representation and channel operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },

    #[error("{check} residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    Certification { check: String, residual: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Certification,
    Numerical,
}

impl Error {
    pub fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub fn certification(check: impl Into<String>, residual: f64, tol: f64) -> Self {
        Error::Certification {
            check: check.into(),
            residual,
            tol,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Certification { .. } => ErrorKind::Certification,
            Error::Numerical(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
