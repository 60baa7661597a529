use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SystemError;
use crate::capacity::StateMatrix;
use crate::distributions::InputShaping;

/// ESN states beyond this magnitude count as divergence.
pub const ESN_DIVERGENCE: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Linear,
    Tanh,
    /// Leaky integrator `(1 - 1/tau) x + (1/tau) tanh(.)`.
    LeakyTanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsnConfig {
    #[serde(default = "fifty")]
    pub n_nodes: usize,
    pub spectral_radius: f64,
    #[serde(default = "tenth")]
    pub input_intensity: f64,
    pub activation: Activation,
    #[serde(default = "leak")]
    pub leak: f64,
    pub weight_seed: u64,
}

fn fifty() -> usize {
    50
}
fn tenth() -> f64 {
    0.1
}
fn leak() -> f64 {
    1.25
}

impl EsnConfig {
    pub fn new(activation: Activation, spectral_radius: f64, weight_seed: u64) -> Self {
        EsnConfig {
            n_nodes: 50,
            spectral_radius,
            input_intensity: 0.1,
            activation,
            leak: 1.25,
            weight_seed,
        }
    }
}

/// Largest eigenvalue modulus, from the real Schur form.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct Esn {
    /// Internal weights already scaled to spectral radius `rho`.
    pub w: DMatrix<f64>,
    pub w_in: DVector<f64>,
    pub activation: Activation,
    pub leak: f64,
}

impl Esn {
    pub fn new(cfg: &EsnConfig) -> Result<Self, SystemError> {
        if cfg.n_nodes == 0 {
            return Err(SystemError::InvalidParameter {
                field: "n_nodes",
                reason: "must be at least 1".into(),
            });
        }
        if !(cfg.spectral_radius >= 0.0 && cfg.spectral_radius.is_finite()) {
            return Err(SystemError::InvalidParameter {
                field: "spectral_radius",
                reason: "must be non-negative".into(),
            });
        }
        if cfg.activation == Activation::LeakyTanh && !(cfg.leak >= 1.0) {
            return Err(SystemError::InvalidParameter {
                field: "leak",
                reason: "must be at least 1".into(),
            });
        }
        let n = cfg.n_nodes;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.weight_seed);
        let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let w_in = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        let rad = spectral_radius(&raw);
        if !(rad > 0.0) {
            return Err(SystemError::InvalidParameter {
                field: "weight_seed",
                reason: "internal weights have zero spectral radius".into(),
            });
        }
        Ok(Esn {
            w: raw * (cfg.spectral_radius / rad),
            w_in: w_in * cfg.input_intensity,
            activation: cfg.activation,
            leak: cfg.leak,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.w_in.len()
    }

    /// Rows `x_0 .. x_{T-1}` for `T = input.len()`, with `x_0 = 0`.
    pub fn run(&self, input: &[f64]) -> Result<DMatrix<f64>, SystemError> {
        let n = self.n_nodes();
        let t_len = input.len();
        let mut out = DMatrix::zeros(t_len, n);
        let mut x = DVector::zeros(n);
        let mut pre = DVector::zeros(n);
        let keep = 1.0 - 1.0 / self.leak;
        for t in 0..t_len.saturating_sub(1) {
            pre.gemv(1.0, &self.w, &x, 0.0);
            pre.axpy(input[t], &self.w_in, 1.0);
            match self.activation {
                Activation::Linear => x.copy_from(&pre),
                Activation::Tanh => x.zip_apply(&pre, |xi, p| *xi = p.tanh()),
                Activation::LeakyTanh => {
                    x.zip_apply(&pre, |xi, p| *xi = keep * *xi + (1.0 - keep) * p.tanh())
                }
            }
            if x.iter().any(|v| !(v.abs() <= ESN_DIVERGENCE)) {
                return Err(SystemError::Divergence { step: t + 1 });
            }
            for j in 0..n {
                out[(t + 1, j)] = x[j];
            }
        }
        Ok(out)
    }
}

/// Simulates the network and drops the first `washout` rows.
pub fn simulate_esn(cfg: &EsnConfig, input: &[f64], washout: usize) -> Result<StateMatrix, SystemError> {
    let esn = Esn::new(cfg)?;
    let need = washout + cfg.n_nodes + 1;
    if input.len() < need {
        return Err(SystemError::InputTooShort {
            need,
            got: input.len(),
        });
    }
    let full = esn.run(input)?;
    let kept = full.rows(washout, input.len() - washout).into_owned();
    let mut s = StateMatrix::new(kept, washout)?;
    s.metadata.insert("initial_state".into(), "zeros".into());
    Ok(s)
}

/// Scalar `x_{t+1} = tanh(rho x_t + mu + kappa zeta_t)` from `x_0 = 0`.
pub fn simulate_1d_esn(
    rho: f64,
    shaping: &InputShaping,
    zeta: &[f64],
    washout: usize,
) -> Result<StateMatrix, SystemError> {
    if zeta.len() < washout + 2 {
        return Err(SystemError::InputTooShort {
            need: washout + 2,
            got: zeta.len(),
        });
    }
    let mut xs = Vec::with_capacity(zeta.len());
    let mut x = 0.0f64;
    xs.push(x);
    for &z in &zeta[..zeta.len() - 1] {
        x = (rho * x + shaping.apply(z)).tanh();
        xs.push(x);
    }
    let mut s = StateMatrix::from_column(&xs[washout..], washout)?;
    s.metadata.insert("initial_state".into(), "0".into());
    Ok(s)
}
