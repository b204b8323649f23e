use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid balance sheet: {0}")]
    BalanceSheet(String),

    #[error("invalid matrix: {0}")]
    Matrix(String),

    /// Entries must sum to one before computing a normalized metric.
    #[error("matrix is not normalized: total mass {total}")]
    NotNormalized { total: f64 },

    #[error("{name} = {value} outside domain {domain}")]
    Domain { name: &'static str, value: f64, domain: String },

    /// Positive mass on a cell where the reference matrix is zero.
    #[error("divergence is infinite: x[{row}][{col}] > 0 where the reference is 0")]
    InfiniteDivergence { row: usize, col: usize },

    #[error("support {axis} {index} is empty")]
    Support { axis: Axis, index: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}
