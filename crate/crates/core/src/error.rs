use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::fieldsolver::FieldError;
use crate::geometry::GeometryError;
use crate::io::ConfigError;
use crate::quadrature::QuadratureError;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-level error, one variant per failing layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Error {
    /// True for errors caused by bad inputs rather than a failed computation.
    pub fn is_precondition(&self) -> bool {
        match self {
            Error::Geometry(_) | Error::Config(_) => true,
            Error::Field(e) => e.is_precondition(),
            Error::Analysis(AnalysisError::Field(e)) => e.is_precondition(),
            Error::Analysis(AnalysisError::InvalidInput(_)) => true,
            _ => false,
        }
    }
}
