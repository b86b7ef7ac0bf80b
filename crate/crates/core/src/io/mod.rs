//! Configuration files, JSON reports and CSV data at the CLI boundary.
//!
//! Everything here speaks nm, Gauss, G/Å and kHz; conversion to SI happens on
//! the way in and back on the way out.

pub mod config;
pub mod csv;
pub mod decimal;
pub mod report;

pub use config::{RunConfig, DEFAULT_CONFIG_TOML};
pub use csv::{contours_to_csv, parse_contours_csv, parse_vectors_csv, vectors_to_csv, VectorRow};
pub use report::{round_sig, to_json_string};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::quadrature::QuadratureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("cannot serialize config: {0}")]
    Serialize(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("species '{0}' is not in the species table")]
    UnknownSpecies(String),
    #[error("invalid geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("invalid quadrature block: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
}
