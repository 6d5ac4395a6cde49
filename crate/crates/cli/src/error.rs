use navdop::NavError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Numerical(#[from] NavError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(e) => match e {
                NavError::Domain(_) | NavError::MissingField { .. } | NavError::NotFound(_) => 3,
                NavError::CatalogParse { .. } | NavError::Io(_) => 2,
                _ => 4,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "parse",
            3 => "validation",
            _ => "numerical",
        }
    }

    /// One-line machine-parsable reason.
    pub fn report(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error kind={} code={} reason=\"{}\"", self.kind(), self.exit_code(), msg.replace('"', "'"))
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}
