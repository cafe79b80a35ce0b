//! Echo state networks: the tanh content-demand predictor, the linear
//! cycle-reservoir mobility predictor, and memory-capacity analysis of the
//! latter.

mod content;
mod memory;
mod mobility;
mod sparse;

use alloc::string::String;

pub use content::{
    project_to_simplex, ContentDistribution, ContentEsn, ContentEsnConfig, ContextVector,
    CONTEXT_WIDTH,
};
pub use memory::{
    empirical_memory_capacity, memory_capacity, memory_capacity_bounds, memory_capacity_series,
    DEFAULT_SERIES_TOL,
};
pub(crate) use mobility::forecasting_window;
pub use mobility::{build_cycle_reservoir, ridge_train, MobilityEsn, TrainingWindow, WeightDistribution};
pub use sparse::{spectral_radius, SparseMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EsnError {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("ridge system is numerically rank deficient")]
    NumericalRank,
    #[error("weight distribution is degenerate: moment series vanish for delay {delay}")]
    DegenerateDistribution { delay: usize },
    #[error("memory-capacity bounds need a zero-mean or strictly positive weight distribution")]
    UnsupportedFamily,
    #[error("measurement failed: {0}")]
    Measurement(&'static str),
}

pub(crate) fn config_err(msg: &str) -> EsnError {
    EsnError::Config(String::from(msg))
}
