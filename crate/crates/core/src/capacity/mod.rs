//! Capacity measurement: SVD of the state, per-target projections,
//! surrogate significance thresholds, detrending and report assembly.

mod detrend;
mod engine;
mod functions;
mod pipeline;
mod report;
mod state;
mod surrogate;
mod svd;

pub use detrend::{detrend, DetrendOutput, FourierComponent};
pub use engine::{capacity_sweep, capacity_sweep_table};
pub use functions::{memory_function, tipc_spectrum};
pub use pipeline::{analyze, AnalysisOptions};
pub use report::{CapacityEntry, CapacityReport, SkippedEntry, ThresholdMeta};
pub use state::StateMatrix;
pub use surrogate::{apply_threshold, null_expectation, surrogate_threshold, ThresholdConfig};
pub use svd::{compute_capacity, decompose, default_rank_tol, SvdBasis};

use thiserror::Error;

use crate::polychaos::PolyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("data error: {0}")]
    Data(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
