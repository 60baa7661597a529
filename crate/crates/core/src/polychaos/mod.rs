//! Orthogonal polynomial families, multivariate chaos targets and their
//! enumeration.

mod enumerate;
mod families;
mod gram_schmidt;
mod spec;
mod target;

pub use enumerate::{enumerate_chaos, SweepSpec};
pub use families::{FamilySpec, PolynomialFamily, DEFAULT_MAX_DEGREE};
pub use gram_schmidt::{fit_gram_schmidt, GramSchmidtBasis};
pub use spec::{ChaosSpec, ChaosTerm, Phase, TemporalFactor};
pub use target::{build_target, temporal_value, temporal_wave, PolyTable, TargetSeries};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("degree {degree} exceeds the maximum {max} for {family}")]
    DegreeOutOfRange {
        family: String,
        degree: usize,
        max: usize,
    },
    #[error("invalid parameter `{field}` for {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        field: &'static str,
        reason: String,
    },
    #[error("Gram-Schmidt basis degenerates at degree {degree}: {reason}")]
    Degenerate { degree: usize, reason: String },
    #[error("window [{start}, {end}) invalid for `{spec}`: {reason}")]
    Window {
        spec: String,
        start: usize,
        end: usize,
        reason: String,
    },
    #[error("target `{spec}` has zero norm over the window")]
    DegenerateTarget { spec: String },
    #[error("cannot parse chaos spec `{text}`: {reason}")]
    Parse { text: String, reason: String },
}
