//! Information processing capacity of stochastically driven dynamical
//! systems, measured by projecting state time series onto (time-dependent)
//! polynomial chaos targets.

pub mod capacity;
pub mod distributions;
pub mod narma_analysis;
pub mod numeric;
pub mod polychaos;
pub mod systems;

pub use capacity::{CapacityReport, StateMatrix, SvdBasis};
pub use distributions::{DistributionSpec, InputShaping};
pub use polychaos::{ChaosSpec, FamilySpec, PolynomialFamily};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
