use thiserror::Error;

#[derive(Debug, Error)]
pub enum NavError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("singular {what} (smallest eigenvalue {eigenvalue:e})")]
    Singular { what: &'static str, eigenvalue: f64 },
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("epsilon fit residual {residual:e} exceeds {tolerance:e}")]
    FitResidual { residual: f64, tolerance: f64 },
    #[error("missing field {field} for {name}")]
    MissingField { name: String, field: &'static str },
    #[error("catalog line {line}: {reason}")]
    CatalogParse { line: usize, reason: String },
    #[error("no catalog entry matches '{0}'")]
    NotFound(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NavError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(NavError::Domain(msg.into()))
}
