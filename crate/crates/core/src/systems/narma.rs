use serde::{Deserialize, Serialize};

use super::SystemError;
use crate::capacity::StateMatrix;
use crate::distributions::InputShaping;

/// `|y|` beyond this counts as divergence.
pub const NARMA_DIVERGENCE: f64 = 1e6;

const ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Narma10Config {
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_beta")]
    pub beta: f64,
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "d_delta")]
    pub delta: f64,
    pub shaping: InputShaping,
    /// `y_0 .. y_9`, newest last.
    #[serde(default = "d_init")]
    pub init: Vec<f64>,
}

fn d_alpha() -> f64 {
    0.3
}
fn d_beta() -> f64 {
    0.05
}
fn d_gamma() -> f64 {
    1.5
}
fn d_delta() -> f64 {
    0.1
}
fn d_init() -> Vec<f64> {
    vec![0.0; ORDER]
}

impl Narma10Config {
    pub fn new(shaping: InputShaping) -> Self {
        Narma10Config {
            alpha: 0.3,
            beta: 0.05,
            gamma: 1.5,
            delta: 0.1,
            shaping,
            init: d_init(),
        }
    }

    /// History built from the two-variable reduction: the newest value is
    /// `w1` and the nine older values share `w2 - w1` equally.
    pub fn with_reduced_init(mut self, w1: f64, w2: f64) -> Self {
        let rest = (w2 - w1) / 9.0;
        self.init = vec![rest; ORDER];
        self.init[ORDER - 1] = w1;
        self
    }

    /// Every initial value equal to `psi`.
    pub fn with_constant_init(mut self, psi: f64) -> Self {
        self.init = vec![psi; ORDER];
        self
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        if self.init.len() != ORDER {
            return Err(SystemError::InvalidParameter {
                field: "init",
                reason: format!("needs exactly {ORDER} values, got {}", self.init.len()),
            });
        }
        for (field, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !v.is_finite() {
                return Err(SystemError::InvalidParameter {
                    field,
                    reason: "must be finite".into(),
                });
            }
        }
        if self.init.iter().any(|v| !v.is_finite()) {
            return Err(SystemError::InvalidParameter {
                field: "init",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// Streaming NARMA10 stepper with fixed-size histories.
#[derive(Debug, Clone)]
pub struct Narma10 {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    shaping: InputShaping,
    y: [f64; ORDER],
    u: [f64; ORDER],
    /// Index of the newest `y` in the ring.
    head: usize,
    /// Inputs consumed so far.
    t: usize,
}

impl Narma10 {
    pub fn new(cfg: &Narma10Config) -> Result<Self, SystemError> {
        cfg.validate()?;
        let mut y = [0.0; ORDER];
        y.copy_from_slice(&cfg.init);
        Ok(Narma10 {
            alpha: cfg.alpha,
            beta: cfg.beta,
            gamma: cfg.gamma,
            delta: cfg.delta,
            shaping: cfg.shaping,
            y,
            u: [0.0; ORDER],
            head: ORDER - 1,
            t: 0,
        })
    }

    /// Consumes `zeta_t`. Returns `y_{t+1}` once ten inputs are available,
    /// `None` while the input history is still filling.
    #[inline]
    pub fn step(&mut self, zeta: f64) -> Option<f64> {
        let ut = self.shaping.apply(zeta);
        self.u[self.t % ORDER] = ut;
        self.t += 1;
        if self.t < ORDER {
            return None;
        }
        // Slot after the newest holds u_{t-9}.
        let u_old = self.u[self.t % ORDER];
        let yt = self.y[self.head];
        let sum: f64 = self.y.iter().sum();
        let next = self.alpha * yt + self.beta * yt * sum + self.gamma * ut * u_old + self.delta;
        self.head = (self.head + 1) % ORDER;
        self.y[self.head] = next;
        Some(next)
    }

    /// The current history `y_{t-9} .. y_t`.
    pub fn history(&self) -> [f64; ORDER] {
        let mut out = [0.0; ORDER];
        for (i, v) in out.iter_mut().enumerate() {
            *v = self.y[(self.head + 1 + i) % ORDER];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NarmaRun {
    /// `series[t] = y_t`; the first ten entries are the initial history.
    pub series: Vec<f64>,
    /// First step whose value exceeded the divergence bound. The series is
    /// truncated just before it.
    pub diverged_at: Option<usize>,
}

impl NarmaRun {
    /// Single-column state over `washout .. series.len()`.
    pub fn state(&self, washout: usize) -> Result<StateMatrix, SystemError> {
        if let Some(step) = self.diverged_at {
            return Err(SystemError::Divergence { step });
        }
        if self.series.len() < washout + 2 {
            return Err(SystemError::InputTooShort {
                need: washout + 2,
                got: self.series.len(),
            });
        }
        Ok(StateMatrix::from_column(&self.series[washout..], washout)?)
    }
}

/// Runs the recurrence over `zeta`; the series has `zeta.len() + 1` values
/// unless it diverges.
pub fn simulate_narma10(cfg: &Narma10Config, zeta: &[f64]) -> Result<NarmaRun, SystemError> {
    let mut sys = Narma10::new(cfg)?;
    let mut series = Vec::with_capacity(zeta.len().max(ORDER - 1) + 1);
    series.extend_from_slice(&cfg.init);
    for &z in zeta {
        if let Some(y) = sys.step(z) {
            if !(y.abs() <= NARMA_DIVERGENCE) {
                let step = series.len();
                return Ok(NarmaRun {
                    series,
                    diverged_at: Some(step),
                });
            }
            series.push(y);
        }
    }
    Ok(NarmaRun {
        series,
        diverged_at: None,
    })
}
