use std::path::PathBuf;

/// Errors raised by the library and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("inhomogeneity x = {x} is outside the closed-form domain")]
    AnalyticDomain { x: f64 },

    #[error("no ground-state crossing for x = {x}")]
    NoCrossing { x: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), message: message.into() }
    }

    /// Process exit code for this error category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } | Error::Config(_) | Error::Contract(_) => 2,
            Error::Convergence { .. }
            | Error::Numerical(_)
            | Error::AnalyticDomain { .. }
            | Error::NoCrossing { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
