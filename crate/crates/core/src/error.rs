use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("no fixed point: (Id - L)a = q is inconsistent, least-squares residual {residual:e}")]
    NoFixedPoint { residual: f64 },

    #[error("beta = {beta} is below the smoothness threshold (Rayleigh quotient {rayleigh})")]
    BetaTooSmall { beta: f64, rayleigh: f64 },

    #[error("parameter sequence violates {condition} at index {index}")]
    InvalidTSequence {
        index: usize,
        condition: crate::fista::TCondition,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("objective is unbounded below on the constraint set (residual {residual:e})")]
    Unbounded { residual: f64 },

    #[error("trace carries no oracle data")]
    MissingOracleData,
}
