//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by any ordcert operation.
#[derive(Error, Debug)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV parse error at row {row}, column {col}: {msg}")]
    CsvCell { row: usize, col: usize, msg: String },

    #[error("ragged CSV: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value `{value}` at row {row}, column {col}")]
    NonFiniteCell {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("dataset too small: need n >= 2 and p >= 2, got n = {n}, p = {p}")]
    DatasetTooSmall { n: usize, p: usize },

    #[error("column `{name}` (index {index}) has zero sample variance")]
    ConstantColumn { index: usize, name: String },

    #[error("variable index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("duplicate variable index {index} in requested set")]
    DuplicateIndex { index: usize },

    #[error("underdetermined regression: {k} design columns with only {n} rows")]
    Underdetermined { n: usize, k: usize },

    #[error("non-finite value encountered in {context}")]
    NonFiniteInput { context: &'static str },

    #[error("test function {index} is affine; affine maps yield identically zero statistics")]
    AffineTestFunction { index: usize },

    #[error("the regressor set U must be nonempty")]
    EmptyRegressorSet,

    #[error("target variable {v} must not be in the regressor set")]
    TargetInRegressors { v: usize },

    #[error("oracle calibration requested but no error sampler was supplied")]
    OracleSamplerMissing,

    #[error("ordering has {found} entries, expected {expected}")]
    OrderingLengthMismatch { expected: usize, found: usize },

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("confidence set is empty: the model class is rejected by the data")]
    EmptyConfidenceSet,

    #[error("confidence set was built at alpha = {cs_alpha}, but alpha/2 = {expected} is required")]
    AlphaMismatch { cs_alpha: f64, expected: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
