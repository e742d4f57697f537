use thiserror::Error;

/// Failures of a CLI run, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Scenario or argument problem, found before any computation.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    /// The analysis itself failed on a well-formed scenario.
    #[error("{context}: {source}")]
    Computation {
        context: String,
        #[source]
        source: qobserve::Error,
    },

    /// Scenario expectations were not met by the computed report.
    #[error("{scenario}: expectation failed for {fields}")]
    Expectation { scenario: String, fields: String },

    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn computation(context: impl Into<String>, source: qobserve::Error) -> Self {
        Self::Computation {
            context: context.into(),
            source,
        }
    }

    /// 1 for validation failures, 2 for everything that happens after loading.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation { .. } => 1,
            Self::Computation { .. } | Self::Expectation { .. } | Self::Output { .. } => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
