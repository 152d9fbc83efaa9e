use std::path::PathBuf;

use openphase::holonomy::HolonomyError;
use openphase::lindblad::LindbladError;
use openphase::matops::MatError;
use openphase::oracle::OracleError;
use openphase::stirap::StirapError;

/// Failures of the command-line layer.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown figure id '{0}' (expected one of: {list})", list = crate::figures::FigureId::names().join(", "))]
    UnknownFigure(String),
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("invalid config field '{field}': {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("matrix file line {line}: {reason}")]
    MatrixParse { line: usize, reason: String },
    #[error(transparent)]
    Jordan(#[from] MatError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Pulse(#[from] StirapError),
    #[error(transparent)]
    Rates(#[from] LindbladError),
    #[error("worker pool: {0}")]
    ThreadPool(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}
