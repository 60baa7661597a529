use serde::{Deserialize, Serialize};

use super::SystemError;
use crate::capacity::StateMatrix;
use crate::distributions::InputShaping;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitCycleConfig {
    #[serde(default = "d_omega")]
    pub omega: f64,
    #[serde(default = "d_tau")]
    pub tau: f64,
    #[serde(default = "d_shaping")]
    pub shaping: InputShaping,
    #[serde(default = "d_r0")]
    pub r0: f64,
    #[serde(default)]
    pub theta0: f64,
}

fn d_omega() -> f64 {
    2.0 * std::f64::consts::PI / 3.0
}
fn d_tau() -> f64 {
    0.1
}
fn d_shaping() -> InputShaping {
    InputShaping::new(0.2, 1.5)
}
fn d_r0() -> f64 {
    1.0
}

impl Default for LimitCycleConfig {
    fn default() -> Self {
        LimitCycleConfig {
            omega: d_omega(),
            tau: d_tau(),
            shaping: d_shaping(),
            r0: d_r0(),
            theta0: 0.0,
        }
    }
}

impl LimitCycleConfig {
    /// Steps per revolution, `2 pi / (omega tau)`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.omega * self.tau)
    }
}

#[derive(Debug, Clone)]
pub struct LimitCycleRun {
    /// Columns `x = r cos(theta)` and `y = r sin(theta)`.
    pub state: StateMatrix,
    pub radius: Vec<f64>,
    /// Steps where the radial update went negative and was clamped to zero.
    pub clamped_steps: Vec<usize>,
}

/// Polar recurrence `r' = (1+tau) r - tau r^3 + tau u`, `theta' = theta + tau omega`.
pub fn simulate_limit_cycle(
    cfg: &LimitCycleConfig,
    zeta: &[f64],
    washout: usize,
) -> Result<LimitCycleRun, SystemError> {
    if !(cfg.tau > 0.0 && cfg.tau.is_finite()) {
        return Err(SystemError::InvalidParameter {
            field: "tau",
            reason: "must be positive".into(),
        });
    }
    if !(cfg.r0 >= 0.0 && cfg.r0.is_finite()) {
        return Err(SystemError::InvalidParameter {
            field: "r0",
            reason: "must be non-negative".into(),
        });
    }
    if zeta.len() < washout + 3 {
        return Err(SystemError::InputTooShort {
            need: washout + 3,
            got: zeta.len(),
        });
    }
    let tau = cfg.tau;
    let dtheta = tau * cfg.omega;
    let mut r = cfg.r0;
    let mut radius = Vec::with_capacity(zeta.len());
    let mut clamped = Vec::new();
    radius.push(r);
    for (t, &z) in zeta[..zeta.len() - 1].iter().enumerate() {
        r = (1.0 + tau) * r - tau * r * r * r + tau * cfg.shaping.apply(z);
        if r < 0.0 {
            r = 0.0;
            clamped.push(t + 1);
        }
        if !r.is_finite() {
            return Err(SystemError::Divergence { step: t + 1 });
        }
        radius.push(r);
    }
    let rows: Vec<Vec<f64>> = (washout..zeta.len())
        .map(|t| {
            // Multiples of dtheta keep the phase free of accumulated rounding.
            let th = cfg.theta0 + t as f64 * dtheta;
            vec![radius[t] * th.cos(), radius[t] * th.sin()]
        })
        .collect();
    let mut state = StateMatrix::from_rows(&rows, washout)?;
    state.labels = Some(vec!["x".into(), "y".into()]);
    state.metadata.insert("clamped_steps".into(), clamped.len().to_string());
    Ok(LimitCycleRun {
        state,
        radius,
        clamped_steps: clamped,
    })
}
