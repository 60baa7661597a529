//! Reference dynamical systems and the linear readout.
//!
//! Every simulator uses the same time convention: the returned state at
//! step `t` is `x_t`, the initial state is `x_0`, and `x_{t+1}` is computed
//! from `x_t` and the input `zeta_t`. A state at step `t` therefore depends
//! on inputs with delays `s >= 1`.

mod esn;
mod limit_cycle;
mod narma;
mod readout;

pub use esn::{simulate_1d_esn, simulate_esn, spectral_radius, Activation, Esn, EsnConfig, ESN_DIVERGENCE};
pub use limit_cycle::{simulate_limit_cycle, LimitCycleConfig, LimitCycleRun};
pub use narma::{simulate_narma10, Narma10, Narma10Config, NarmaRun, NARMA_DIVERGENCE};
pub use readout::{nrmse, train_readout, Readout, ReadoutSplit};

use thiserror::Error;

use crate::capacity::CapacityError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("state diverged at step {step}")]
    Divergence { step: usize },
    #[error("input too short: need at least {need} samples, got {got}")]
    InputTooShort { need: usize, got: usize },
    #[error(transparent)]
    State(#[from] CapacityError),
}

pub const DEFAULT_WASHOUT: usize = 1000;
