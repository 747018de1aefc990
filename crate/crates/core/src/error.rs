use thiserror::Error;

use crate::seifert::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates from the conjugate transpose by {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid Seifert data: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(
        "unresolved degeneracy: {count} sample point(s) have a coordinate equal to 1; \
         supply L± data or opt into the naive fallback"
    )]
    UnresolvedDegeneracy { count: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
