use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller combined inputs in a way the operation does not accept.
    #[error("usage error: {0}")]
    Usage(String),

    /// A group-testing design maps the null boundary onto 0 or 1.
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// Both the direct and the log-space evaluation produced a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("{path}: input contains no data rows")]
    EmptyInput { path: PathBuf },

    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: PathBuf, column: &'static str },

    #[error("{path}: row {row}: {message}")]
    MalformedRow {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: row {row} ({name}): deaths {deaths} exceed confirmed {confirmed}")]
    DeathsExceedConfirmed {
        path: PathBuf,
        row: usize,
        name: String,
        confirmed: u64,
        deaths: u64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub(crate) fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must lie in [0, 1], got {value}"
        )))
    }
}
