use serde::{Deserialize, Serialize};

use super::detrend::detrend;
use super::engine::capacity_sweep;
use super::report::CapacityReport;
use super::state::StateMatrix;
use super::surrogate::ThresholdConfig;
use super::svd::{decompose, default_rank_tol};
use super::CapacityError;
use crate::polychaos::{ChaosSpec, PolynomialFamily};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    /// Remove this many dominant Fourier components per column after
    /// centering. `None` only centers.
    #[serde(default)]
    pub detrend_harmonics: Option<usize>,
    /// Relative singular-value cutoff; defaults to `default_rank_tol(T)`.
    #[serde(default)]
    pub rank_tol: Option<f64>,
    #[serde(default)]
    pub threshold: ThresholdConfig,
}

/// Centers (or detrends) the state, decomposes it and sweeps `specs`.
/// Row `i` of the state is paired with input time `state.washout + i`.
pub fn analyze(
    state: &StateMatrix,
    zeta: &[f64],
    family: &PolynomialFamily,
    specs: &[ChaosSpec],
    opts: &AnalysisOptions,
) -> Result<CapacityReport, CapacityError> {
    let prepared = match opts.detrend_harmonics {
        Some(k) if k > 0 => detrend(state, k)?.state,
        _ => state.centered(),
    };
    let tol = opts.rank_tol.unwrap_or_else(|| default_rank_tol(prepared.rows()));
    let basis = decompose(&prepared, tol)?;
    let mut rep = capacity_sweep(&basis, specs, family, zeta, state.washout, &opts.threshold)?;
    rep.metadata.insert("family".into(), family.name().to_string());
    rep.metadata.insert("washout".into(), state.washout.to_string());
    if let Some(k) = opts.detrend_harmonics {
        rep.metadata.insert("detrend_harmonics".into(), k.to_string());
    }
    for (k, v) in &state.metadata {
        rep.metadata.entry(format!("state.{k}")).or_insert_with(|| v.clone());
    }
    Ok(rep)
}
