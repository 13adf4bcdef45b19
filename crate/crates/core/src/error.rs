use thiserror::Error;

use crate::linprog::LpError;

#[derive(Debug, Error)]
pub enum DeaError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("non-numeric cell {value:?} at row {row}, column {column:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate unit id {0:?}")]
    DuplicateId(String),

    #[error("dataset file contains no data rows")]
    EmptyFile,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("theta = {theta} lies outside the path domain (lower bound {lower})")]
    ThetaOutOfDomain { theta: f64, lower: f64 },

    #[error("direction is zero for a unit that is not the ideal point")]
    ZeroDirection,

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("evaluated unit does not belong to the technology set")]
    NotInTechnology,

    #[error("path did not leave the technology set before theta floor {floor}")]
    DomainExit { floor: f64 },

    #[error("direct LP requires affine path functions, got {0}")]
    NonAffineSpec(String),

    #[error("unknown unit id {0:?}")]
    UnknownUnit(String),

    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, DeaError>;
