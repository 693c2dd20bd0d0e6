use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: String,
        found: String,
    },

    #[error("{which} is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { which: String, asymmetry: f64 },

    #[error("{which} is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite {
        which: String,
        pivot: usize,
        value: f64,
    },

    #[error("{which} is singular (pivot {pivot}); reduce the dimension of the input first")]
    Singular { which: String, pivot: usize },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("RV coefficient is undefined for a zero operator")]
    ZeroOperator,

    #[error("requested rank {requested} is out of range (maximum {max})")]
    RankOutOfRange { requested: usize, max: usize },

    #[error("column {column} has zero variance and cannot be standardized")]
    ZeroVariance { column: String },

    #[error("{axis} {label} has a zero marginal total")]
    ZeroMarginal { axis: &'static str, label: String },

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("graph is disconnected ({components} components); use the per-component mode")]
    Disconnected { components: usize },

    #[error("the zero vector has no Geary ratio")]
    ZeroVector,

    #[error("self loop on node {label} (line {line})")]
    SelfLoop { label: String, line: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: cannot parse {value:?} at row {row}, column {column}")]
    Parse {
        path: PathBuf,
        row: String,
        column: String,
        value: String,
    },

    #[error("{path}: duplicate {axis} label {label:?}")]
    DuplicateLabel {
        path: PathBuf,
        axis: &'static str,
        label: String,
    },

    #[error("{0}: table is empty")]
    EmptyTable(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(what: impl Into<String>, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
