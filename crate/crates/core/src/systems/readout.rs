use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SystemError;
use crate::capacity::StateMatrix;

/// Sequential train/test split: the first `train_fraction` of the rows fit
/// the readout and the rest score it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutSplit {
    pub train_fraction: f64,
}

impl Default for ReadoutSplit {
    fn default() -> Self {
        ReadoutSplit { train_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Error on the test span.
    pub nrmse: f64,
    /// Readout output over every row.
    pub prediction: Vec<f64>,
    pub train_rows: usize,
}

/// `sqrt(sum (yhat - y)^2 / sum (y - mean y)^2)`. Infinite for a constant
/// target with nonzero error, zero when both vanish.
pub fn nrmse(prediction: &[f64], target: &[f64]) -> f64 {
    let m = crate::numeric::mean(target);
    let num: f64 = prediction.iter().zip(target).map(|(p, y)| (p - y) * (p - y)).sum();
    let den: f64 = target.iter().map(|y| (y - m) * (y - m)).sum();
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

/// Least-squares linear readout with intercept through the SVD
/// pseudoinverse, so rank-deficient states are fine.
pub fn train_readout(state: &StateMatrix, target: &[f64], split: ReadoutSplit) -> Result<Readout, SystemError> {
    let t = state.rows();
    if target.len() != t {
        return Err(SystemError::InvalidParameter {
            field: "target",
            reason: format!("length {} does not match {t} state rows", target.len()),
        });
    }
    if !(split.train_fraction > 0.0 && split.train_fraction < 1.0) {
        return Err(SystemError::InvalidParameter {
            field: "train_fraction",
            reason: "must lie strictly between 0 and 1".into(),
        });
    }
    let n = state.cols();
    let train = ((t as f64) * split.train_fraction).round() as usize;
    if train < 2 || train >= t {
        return Err(SystemError::InputTooShort { need: 4, got: t });
    }
    let x = state.data();
    let design = DMatrix::from_fn(t, n + 1, |i, j| if j < n { x[(i, j)] } else { 1.0 });
    let a = design.rows(0, train).into_owned();
    let b = DVector::from_column_slice(&target[..train]);
    let (u, s, v) = crate::numeric::thin_svd(&a).ok_or_else(|| SystemError::InvalidParameter {
        field: "state",
        reason: "SVD failed to converge".into(),
    })?;
    let cut = s.first().copied().unwrap_or(0.0) * 1e-12 * (train.max(n + 1) as f64);
    let mut coef = u.tr_mul(&b);
    for (c, &si) in coef.iter_mut().zip(&s) {
        *c = if si > cut { *c / si } else { 0.0 };
    }
    let w = v * coef;
    let pred = &design * &w;
    let prediction: Vec<f64> = pred.iter().copied().collect();
    let score = nrmse(&prediction[train..], &target[train..]);
    Ok(Readout {
        weights: w.rows(0, n).iter().copied().collect(),
        bias: w[n],
        nrmse: score,
        prediction,
        train_rows: train,
    })
}
