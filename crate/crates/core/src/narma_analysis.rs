//! Dynamical analysis of NARMA10: fixed point, nullclines of the
//! two-variable reduction, divergence scans, the Lyapunov spectrum of the
//! ten-dimensional delay embedding, and the linear-plus-cross-term
//! approximate model with its predicted capacities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionSpec, InputShaping};
use crate::numeric::splitmix64;
use crate::systems::{simulate_narma10, Narma10, Narma10Config, SystemError, NARMA_DIVERGENCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no real fixed point: discriminant {discriminant} is negative")]
    NoFixedPoint { discriminant: f64 },
    #[error("trajectory diverged at step {step}")]
    Divergence { step: usize },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("input too short: need at least {need} samples, got {got}")]
    InputTooShort { need: usize, got: usize },
    #[error(transparent)]
    System(#[from] SystemError),
}

/// How `sigma` maps to the input range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// `u` on `[-sigma, sigma]`.
    Symmetric,
    /// `u` on `[0, sigma]`.
    Asymmetric,
}

impl InputMode {
    pub fn shaping(self, sigma: f64) -> InputShaping {
        match self {
            InputMode::Symmetric => InputShaping::symmetric(sigma),
            InputMode::Asymmetric => InputShaping::asymmetric(sigma),
        }
    }
}

fn discriminant(cfg: &Narma10Config) -> (f64, f64) {
    let a = (1.0 - cfg.alpha) / (20.0 * cfg.beta);
    let mu = cfg.shaping.mean;
    (a, a * a - (cfg.gamma * mu * mu + cfg.delta) / (10.0 * cfg.beta))
}

/// Stable root of the mean-field recursion for the constant part of `y`,
/// using the input mean `mu = shaping.mean`.
pub fn fixed_point(cfg: &Narma10Config) -> Result<f64, AnalysisError> {
    if cfg.beta == 0.0 {
        // Linear map y' = alpha y + gamma mu^2 + delta.
        if cfg.alpha.abs() >= 1.0 {
            return Err(AnalysisError::NoFixedPoint { discriminant: f64::NAN });
        }
        let mu = cfg.shaping.mean;
        return Ok((cfg.gamma * mu * mu + cfg.delta) / (1.0 - cfg.alpha));
    }
    let (a, d) = discriminant(cfg);
    if d < 0.0 {
        return Err(AnalysisError::NoFixedPoint { discriminant: d });
    }
    Ok(a - d.sqrt())
}

/// The two nullclines `dw1 = 0` and `dw2 = 0` of the two-variable
/// reduction, evaluated on the nonzero points of `w1_grid`.
pub fn nullclines(cfg: &Narma10Config, z10: f64, w1_grid: &[f64]) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let b = cfg.beta;
    let mut first = Vec::with_capacity(w1_grid.len());
    let mut second = Vec::with_capacity(w1_grid.len());
    for &w1 in w1_grid.iter().filter(|w| **w != 0.0 && w.is_finite()) {
        first.push((w1, (1.0 - cfg.alpha) / b - cfg.delta / (b * w1)));
        second.push((w1, -cfg.alpha / b + (z10 - cfg.delta) / (b * w1)));
    }
    (first, second)
}

/// `(dw1, dw2)` of the input-free reduced map at `(w1, w2)`.
pub fn reduced_increment(cfg: &Narma10Config, w1: f64, w2: f64, z10: f64) -> (f64, f64) {
    let bw = cfg.beta * w1 * w2;
    (
        (cfg.alpha - 1.0) * w1 + bw + cfg.delta,
        cfg.alpha * w1 + bw + cfg.delta - z10,
    )
}

/// Crossing of the two nullclines, `w1 = z10`.
pub fn nullcline_intersection(cfg: &Narma10Config, z10: f64) -> (f64, f64) {
    (z10, (1.0 - cfg.alpha) / cfg.beta - cfg.delta / (cfg.beta * z10))
}

/// First step at which `|y|` leaves the divergence bound, within
/// `max_steps` updates. The input stream is drawn from `seed` on demand.
pub fn divergence_step(cfg: &Narma10Config, max_steps: usize, seed: u64) -> Result<Option<usize>, AnalysisError> {
    let mut sys = Narma10::new(cfg)?;
    let silent = cfg.shaping.scale == 0.0;
    let mut sampler = DistributionSpec::uniform()
        .sampler(seed)
        .map_err(|e| AnalysisError::InvalidParameter {
            field: "seed",
            reason: e.to_string(),
        })?;
    let mut updates = 0usize;
    // Index of the value produced by the next update.
    let mut t = 10usize;
    while updates < max_steps {
        let z = if silent { 0.0 } else { sampler.next_value() };
        if let Some(y) = sys.step(z) {
            if !(y.abs() <= NARMA_DIVERGENCE) {
                return Ok(Some(t));
            }
            updates += 1;
            t += 1;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub max_steps: usize,
    /// `steps[i][j]` for `y[i]`, `x[j]`; `None` survived `max_steps`.
    pub steps: Vec<Vec<Option<usize>>>,
}

impl BasinGrid {
    pub fn survival_fraction(&self) -> f64 {
        let n = self.steps.iter().map(|r| r.len()).sum::<usize>();
        let ok = self.steps.iter().flatten().filter(|s| s.is_none()).count();
        ok as f64 / n.max(1) as f64
    }
}

fn scan<F>(x: &[f64], y: &[f64], cell: F) -> Result<Vec<Vec<Option<usize>>>, AnalysisError>
where
    F: Fn(f64, f64) -> Result<Option<usize>, AnalysisError> + Sync,
{
    y.par_iter()
        .map(|&yv| x.iter().map(|&xv| cell(xv, yv)).collect::<Result<Vec<_>, _>>())
        .collect()
}

/// Divergence steps over initial conditions `(w1, w2)` of the reduced
/// variables, with the input law of `cfg`.
pub fn basin_scan_reduced(
    cfg: &Narma10Config,
    w1: &[f64],
    w2: &[f64],
    max_steps: usize,
    seed: u64,
) -> Result<BasinGrid, AnalysisError> {
    let steps = scan(w1, w2, |a, b| {
        divergence_step(&cfg.clone().with_reduced_init(a, b), max_steps, seed)
    })?;
    Ok(BasinGrid {
        x_label: "w1".into(),
        y_label: "w2".into(),
        x: w1.to_vec(),
        y: w2.to_vec(),
        max_steps,
        steps,
    })
}

/// Divergence steps over a constant initial history `psi` and input
/// intensity `sigma`.
pub fn basin_scan_psi_sigma(
    cfg: &Narma10Config,
    psi: &[f64],
    sigma: &[f64],
    mode: InputMode,
    max_steps: usize,
    seed: u64,
) -> Result<BasinGrid, AnalysisError> {
    let steps = scan(psi, sigma, |p, s| {
        let mut c = cfg.clone().with_constant_init(p);
        c.shaping = mode.shaping(s);
        divergence_step(&c, max_steps, seed)
    })?;
    Ok(BasinGrid {
        x_label: "psi".into(),
        y_label: "sigma".into(),
        x: psi.to_vec(),
        y: sigma.to_vec(),
        max_steps,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub sigma: f64,
    /// Fraction of input series that never diverged within the horizon.
    pub p: f64,
    pub survived: usize,
    pub runs: usize,
}

/// Survival probability per `sigma` over `n_seeds` independent inputs.
/// Seed `k` at grid index `i` is `splitmix64(master ^ splitmix64(i) ^ k)`.
pub fn divergence_probability(
    cfg: &Narma10Config,
    sigmas: &[f64],
    mode: InputMode,
    n_seeds: usize,
    horizon: usize,
    master_seed: u64,
) -> Result<Vec<SurvivalPoint>, AnalysisError> {
    if n_seeds == 0 {
        return Err(AnalysisError::InvalidParameter {
            field: "n_seeds",
            reason: "must be at least 1".into(),
        });
    }
    sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let mut c = cfg.clone();
            c.shaping = mode.shaping(sigma);
            let lane = master_seed ^ splitmix64(i as u64);
            let outcomes = (0..n_seeds)
                .into_par_iter()
                .map(|k| divergence_step(&c, horizon, splitmix64(lane ^ k as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            let survived = outcomes.iter().filter(|o| o.is_none()).count();
            Ok(SurvivalPoint {
                sigma,
                p: survived as f64 / n_seeds as f64,
                survived,
                runs: n_seeds,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovConfig {
    /// Steps whose growth rates are averaged.
    #[serde(default = "d_t")]
    pub t_steps: usize,
    /// Re-orthonormalization period; the first window is a discarded warm-up.
    #[serde(default = "d_m")]
    pub window: usize,
    #[serde(default = "d_k")]
    pub n_exponents: usize,
    /// Leading series values skipped before the warm-up.
    #[serde(default = "d_washout")]
    pub washout: usize,
}

fn d_t() -> usize {
    6000
}
fn d_m() -> usize {
    40
}
fn d_k() -> usize {
    3
}
fn d_washout() -> usize {
    1000
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            t_steps: d_t(),
            window: d_m(),
            n_exponents: d_k(),
            washout: d_washout(),
        }
    }
}

impl LyapunovConfig {
    /// Input samples needed for the trajectory.
    pub fn required_input(&self) -> usize {
        self.washout.max(9) + self.window + self.t_steps + 1
    }
}

/// Applies the Jacobian of the delay embedding at `z = (y_t, .., y_{t-9})`.
#[inline]
fn apply_jacobian(cfg: &Narma10Config, z: &[f64], v: &mut [f64; 10]) {
    let tail: f64 = z[1..].iter().sum();
    let x = cfg.alpha + 2.0 * cfg.beta * z[0] + cfg.beta * tail;
    let y = cfg.beta * z[0];
    let head = x * v[0] + y * v[1..].iter().sum::<f64>();
    for i in (1..10).rev() {
        v[i] = v[i - 1];
    }
    v[0] = head;
}

/// Modified Gram-Schmidt in place, twice for stability. Returns the
/// diagonal of `R`. A column that vanishes is replaced by a unit vector
/// orthogonal to the earlier ones and reports 0.
fn orthonormalize(cols: &mut [[f64; 10]]) -> Vec<f64> {
    let k = cols.len();
    let mut diag = vec![0.0; k];
    for j in 0..k {
        let before = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for _ in 0..2 {
            for i in 0..j {
                let d: f64 = (0..10).map(|m| cols[i][m] * cols[j][m]).sum();
                for m in 0..10 {
                    cols[j][m] -= d * cols[i][m];
                }
            }
        }
        let nrm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 1e-300 && nrm > before * 1e-14 {
            diag[j] = nrm;
            cols[j].iter_mut().for_each(|v| *v /= nrm);
        } else {
            diag[j] = 0.0;
            cols[j] = complement(&cols[..j]);
        }
    }
    diag
}

fn complement(prev: &[[f64; 10]]) -> [f64; 10] {
    let mut best = [0.0; 10];
    let mut best_norm = -1.0;
    for e in 0..10 {
        let mut v = [0.0; 10];
        v[e] = 1.0;
        for _ in 0..2 {
            for p in prev {
                let d: f64 = (0..10).map(|m| p[m] * v[m]).sum();
                for m in 0..10 {
                    v[m] -= d * p[m];
                }
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > best_norm {
            best_norm = n;
            best = v;
            best.iter_mut().for_each(|x| *x /= n);
        }
    }
    best
}

/// Leading Lyapunov exponents of the delay embedding along the trajectory
/// driven by `zeta`, descending, as mean log growth per step. Exactly
/// contracted directions come out as negative infinity.
pub fn lyapunov_spectrum(cfg: &Narma10Config, lcfg: &LyapunovConfig, zeta: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    let k = lcfg.n_exponents;
    if k == 0 || k > 10 {
        return Err(AnalysisError::InvalidParameter {
            field: "n_exponents",
            reason: "must lie in 1..=10".into(),
        });
    }
    if lcfg.window == 0 || lcfg.t_steps == 0 {
        return Err(AnalysisError::InvalidParameter {
            field: if lcfg.window == 0 { "window" } else { "t_steps" },
            reason: "must be at least 1".into(),
        });
    }
    let need = lcfg.required_input();
    if zeta.len() < need {
        return Err(AnalysisError::InputTooShort { need, got: zeta.len() });
    }
    let run = simulate_narma10(cfg, &zeta[..need])?;
    if let Some(step) = run.diverged_at {
        return Err(AnalysisError::Divergence { step });
    }
    let y = &run.series;
    let start = lcfg.washout.max(9);
    let mut basis: Vec<[f64; 10]> = (0..k)
        .map(|j| {
            let mut v = [0.0; 10];
            v[j] = 1.0;
            v
        })
        .collect();
    let mut logs = vec![0.0f64; k];
    let total = lcfg.window + lcfg.t_steps;
    let mut z = [0.0; 10];
    for step in 0..total {
        let t = start + step;
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = y[t - i];
        }
        for v in basis.iter_mut() {
            apply_jacobian(cfg, &z, v);
        }
        let block_end = (step + 1) % lcfg.window == 0 || step + 1 == total;
        if block_end {
            let d = orthonormalize(&mut basis);
            if step >= lcfg.window {
                for (l, r) in logs.iter_mut().zip(&d) {
                    *l += r.ln();
                }
            }
        }
    }
    let mut out: Vec<f64> = logs.iter().map(|l| l / lcfg.t_steps as f64).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Coefficients of `y_t = p + sum q_s P1(zeta_{t-s}) + sum r_s P1(zeta_{t-s}) P1(zeta_{t-s-9})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxModelCoeffs {
    pub p: f64,
    /// `(s, q_s)` for the linear terms.
    pub q: Vec<(usize, f64)>,
    /// `(s, r_s)` for the cross terms pairing delays `s` and `s + 9`.
    pub r: Vec<(usize, f64)>,
}

/// Full coefficient sequences `q_1..q_n` and `r_1..r_n` from the
/// stationary recursions (index 0 unused and zero).
pub fn coefficient_sequences(cfg: &Narma10Config, n: usize) -> Result<(f64, Vec<f64>, Vec<f64>), AnalysisError> {
    let p = fixed_point(cfg)?;
    let (a, b, g) = (cfg.alpha, cfg.beta, cfg.gamma);
    let (mu, kappa) = (cfg.shaping.mean, cfg.shaping.scale);
    let lin = a + 10.0 * b * p;
    // r_s needs q up to s + 8.
    let nq = n + 9;
    let mut q = vec![0.0; nq + 1];
    for s in 1..=nq {
        let mut v = if s == 1 || s == 10 { g * mu * kappa } else { 0.0 };
        if s >= 2 {
            v += lin * q[s - 1];
            let upper = (s - 2).min(9);
            v += b * p * (0..=upper).map(|j| q[s - j - 1]).sum::<f64>();
        }
        q[s] = v;
    }
    let mut r = vec![0.0; n + 1];
    for s in 1..=n {
        if s == 1 {
            r[1] = g * kappa * kappa;
            continue;
        }
        let mut v = lin * r[s - 1];
        v += b * q[s - 1] * (0..=9).map(|j| q[s + 8 - j]).sum::<f64>();
        let upper = (s - 2).min(9);
        v += b * (0..=upper)
            .map(|j| p * r[s - j - 1] + q[s + 8] * q[s - j - 1])
            .sum::<f64>();
        r[s] = v;
    }
    q.truncate(n + 1);
    Ok((p, q, r))
}

pub fn approx_model_coeffs(cfg: &Narma10Config, n1: &[usize], n2: &[usize]) -> Result<ApproxModelCoeffs, AnalysisError> {
    if n1.iter().chain(n2).any(|&s| s == 0) {
        return Err(AnalysisError::InvalidParameter {
            field: "delays",
            reason: "delays start at 1".into(),
        });
    }
    let n = n1.iter().chain(n2).copied().max().unwrap_or(1);
    let (p, q, r) = coefficient_sequences(cfg, n)?;
    let mut qs: Vec<(usize, f64)> = n1.iter().map(|&s| (s, q[s])).collect();
    let mut rs: Vec<(usize, f64)> = n2.iter().map(|&s| (s, r[s])).collect();
    qs.sort_by_key(|e| e.0);
    qs.dedup_by_key(|e| e.0);
    rs.sort_by_key(|e| e.0);
    rs.dedup_by_key(|e| e.0);
    Ok(ApproxModelCoeffs { p, q: qs, r: rs })
}

impl ApproxModelCoeffs {
    /// Oldest input index any term reads, relative to `t`.
    pub fn max_delay(&self) -> usize {
        let a = self.q.iter().map(|e| e.0).max().unwrap_or(0);
        let b = self.r.iter().map(|e| e.0 + 9).max().unwrap_or(0);
        a.max(b)
    }

    /// Coefficients rescaled to unit-variance targets: `q_s sqrt(m2)` and
    /// `r_s m2`, where `m2 = E[P1(zeta)^2]` (1/3 for uniform input).
    pub fn normalized(&self, m2: f64) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
        (
            self.q.iter().map(|&(s, v)| (s, v * m2.sqrt())).collect(),
            self.r.iter().map(|&(s, v)| (s, v * m2)).collect(),
        )
    }

    /// Capacity each term should carry in the model's own IPC report, as
    /// `(spec, C)`: normalized squared coefficients over their total.
    pub fn predicted_capacities(&self, m2: f64) -> Vec<(String, f64)> {
        let (qh, rh) = self.normalized(m2);
        let total: f64 = qh.iter().chain(&rh).map(|e| e.1 * e.1).sum();
        let mut out: Vec<(String, f64)> = qh
            .iter()
            .map(|&(s, v)| (format!("1@{s}"), v * v / total))
            .collect();
        out.extend(rh.iter().map(|&(s, v)| (format!("1@{}*1@{}", s, s + 9), v * v / total)));
        out
    }

    /// Capacities from the unscaled coefficients, `q_s^2 / (sum q^2 + sum r^2)`.
    pub fn raw_capacity_ratios(&self) -> Vec<(String, f64)> {
        self.predicted_capacities(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSeries {
    /// Time index of `values[0]`.
    pub start: usize,
    pub values: Vec<f64>,
}

/// Evaluates the approximate model at every `t` in `max_delay ..= zeta.len()`
/// with `P1(zeta) = zeta`.
pub fn simulate_approx_model(coeffs: &ApproxModelCoeffs, zeta: &[f64]) -> Result<ApproxSeries, AnalysisError> {
    let d = coeffs.max_delay().max(1);
    if zeta.len() < d {
        return Err(AnalysisError::InputTooShort { need: d, got: zeta.len() });
    }
    let values = (d..=zeta.len())
        .map(|t| {
            let lin: f64 = coeffs.q.iter().map(|&(s, q)| q * zeta[t - s]).sum();
            let cross: f64 = coeffs.r.iter().map(|&(s, r)| r * zeta[t - s] * zeta[t - s - 9]).sum();
            coeffs.p + lin + cross
        })
        .collect();
    Ok(ApproxSeries { start: d, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::sample_stream;
    use crate::numeric::thin_svd;
    use nalgebra::DMatrix;

    fn defaults(sh: InputShaping) -> Narma10Config {
        Narma10Config::new(sh)
    }

    #[test]
    fn fixed_point_matches_iteration() {
        let cfg = defaults(InputShaping::new(0.0, 0.0));
        let p = fixed_point(&cfg).unwrap();
        assert!((p - (0.7 - 0.29f64.sqrt())).abs() < 1e-15);
        // Mean-field recurrence p' = alpha p + 10 beta p^2 + gamma mu^2 + delta.
        let mut x = 0.0f64;
        for _ in 0..10_000 {
            x = 0.3 * x + 0.5 * x * x + 0.1;
        }
        assert!((x - p).abs() < 1e-10);
        let run = simulate_narma10(&cfg, &vec![0.0; 10_000]).unwrap();
        assert!((run.series.last().unwrap() - p).abs() < 1e-8);
    }

    #[test]
    fn fixed_point_edge_cases() {
        let mut cfg = defaults(InputShaping::new(0.0, 0.0));
        cfg.delta = 0.0;
        assert_eq!(fixed_point(&cfg).unwrap(), 0.0);
        cfg.delta = 1.0;
        assert!(matches!(fixed_point(&cfg), Err(AnalysisError::NoFixedPoint { .. })));
    }

    #[test]
    fn nullcline_values() {
        let cfg = defaults(InputShaping::default());
        let (a, b) = nullclines(&cfg, 0.1, &[0.0, 0.5, -2.0]);
        assert_eq!(a.len(), 2);
        assert!(b.iter().all(|&(_, w2)| (w2 + 6.0).abs() < 1e-12));
        let (a, _) = nullclines(&cfg, 0.2, &[0.2]);
        let direct = 0.7 / 0.05 - 0.1 / (0.05 * 0.2);
        assert!((a[0].1 - direct).abs() < 1e-12 && (a[0].1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn nullclines_cross_at_a_stationary_point() {
        let cfg = defaults(InputShaping::default());
        for z10 in [0.05, 0.2, 1.3] {
            let (w1, w2) = nullcline_intersection(&cfg, z10);
            assert_eq!(w1, z10);
            let (d1, d2) = reduced_increment(&cfg, w1, w2, z10);
            assert!(d1.abs() < 1e-12 && d2.abs() < 1e-12);
            let (_, b) = nullclines(&cfg, z10, &[w1]);
            assert!((b[0].1 - w2).abs() < 1e-12);
        }
    }

    #[test]
    fn basin_examples() {
        let cfg = defaults(InputShaping::default());
        let g = basin_scan_psi_sigma(&cfg, &[0.0, 2.0], &[0.0], InputMode::Asymmetric, 10_000, 1).unwrap();
        assert_eq!(g.steps[0][0], None);
        assert!(g.steps[0][1].unwrap() < 100);
        let r = basin_scan_reduced(&defaults(InputShaping::new(0.0, 0.0)), &[0.0, 0.1], &[0.0, 0.5], 1000, 1).unwrap();
        assert_eq!(r.survival_fraction(), 1.0);
    }

    #[test]
    fn divergence_step_matches_simulation() {
        let cfg = defaults(InputShaping::asymmetric(1.0));
        let seed = 42;
        let zeta = sample_stream(&DistributionSpec::uniform(), 200_000, seed).unwrap();
        let run = simulate_narma10(&cfg, &zeta).unwrap();
        let streamed = divergence_step(&cfg, zeta.len() - 9, seed).unwrap();
        assert_eq!(run.diverged_at, streamed);
        assert!(streamed.is_some());
    }

    #[test]
    fn zero_sigma_never_diverges() {
        let cfg = defaults(InputShaping::default());
        let p = divergence_probability(&cfg, &[0.0], InputMode::Asymmetric, 4, 5000, 3).unwrap();
        assert_eq!(p[0].p, 1.0);
    }

    #[test]
    fn pure_contraction_exponent() {
        let mut cfg = defaults(InputShaping::asymmetric(0.3));
        cfg.beta = 0.0;
        cfg.gamma = 0.0;
        let lcfg = LyapunovConfig {
            t_steps: 400,
            window: 40,
            n_exponents: 10,
            washout: 20,
        };
        let zeta = sample_stream(&DistributionSpec::uniform(), lcfg.required_input(), 1).unwrap();
        let l = lyapunov_spectrum(&cfg, &lcfg, &zeta).unwrap();
        assert!((l[0] - 0.3f64.ln()).abs() < 1e-12);
        assert!(l[1..].iter().all(|&x| x == f64::NEG_INFINITY));
    }

    #[test]
    fn window_choice_does_not_change_exponents() {
        let cfg = defaults(InputShaping::asymmetric(0.3));
        let zeta = sample_stream(&DistributionSpec::uniform(), 10_000, 5).unwrap();
        let a = LyapunovConfig {
            t_steps: 4000,
            window: 40,
            n_exponents: 3,
            washout: 200,
        };
        let b = LyapunovConfig { window: 1, ..a.clone() };
        let la = lyapunov_spectrum(&cfg, &a, &zeta).unwrap();
        let lb = lyapunov_spectrum(&cfg, &b, &zeta).unwrap();
        // Warm-up lengths differ, so only approximate agreement.
        assert!((la[0] - lb[0]).abs() < 0.05, "{la:?} {lb:?}");
        assert!(la.iter().all(|&x| x < 0.0));
    }

    #[test]
    fn leading_exponent_matches_windowed_singular_values() {
        // Averages ln sigma_1 of overlapping length-M Jacobian products.
        let cfg = defaults(InputShaping::asymmetric(0.2));
        let zeta = sample_stream(&DistributionSpec::uniform(), 6000, 8).unwrap();
        let run = simulate_narma10(&cfg, &zeta).unwrap();
        let y = &run.series;
        let m = 40;
        let t0 = 500;
        let windows = 1500;
        let jac = |t: usize| {
            let mut j = DMatrix::zeros(10, 10);
            let tail: f64 = (1..10).map(|i| y[t - i]).sum();
            j[(0, 0)] = cfg.alpha + 2.0 * cfg.beta * y[t] + cfg.beta * tail;
            for c in 1..10 {
                j[(0, c)] = cfg.beta * y[t];
                j[(c, c - 1)] = 1.0;
            }
            j
        };
        let mut acc = 0.0;
        for w in 0..windows {
            let mut prod = DMatrix::<f64>::identity(10, 10);
            for t in (t0 + w)..(t0 + w + m) {
                prod = jac(t) * prod;
            }
            let (_, s, _) = thin_svd(&prod).unwrap();
            acc += s[0].ln() / m as f64;
        }
        let oracle = acc / windows as f64;
        let lcfg = LyapunovConfig {
            t_steps: 4000,
            window: m,
            n_exponents: 1,
            washout: t0,
        };
        let l = lyapunov_spectrum(&cfg, &lcfg, &zeta).unwrap();
        assert!((l[0] - oracle).abs() < 0.05, "{} vs {}", l[0], oracle);
    }

    #[test]
    fn coefficient_examples() {
        let cfg = defaults(InputShaping::asymmetric(0.45));
        let c = approx_model_coeffs(&cfg, &[1, 2, 10], &[1, 2]).unwrap();
        assert!((c.q[0].1 - 0.0759375).abs() < 1e-15);
        assert!((c.r[0].1 - 0.0759375).abs() < 1e-15);
        let p = c.p;
        // Direct evaluation of the s = 2 and s = 10 cases.
        let lin = 0.3 + 0.5 * p;
        let q1 = 0.0759375;
        let q2 = lin * q1 + 0.05 * p * q1;
        assert!((c.q[1].1 - q2).abs() < 1e-15);
        let (_, q, _) = coefficient_sequences(&cfg, 10).unwrap();
        let mut q10 = 0.0759375 + lin * q[9];
        for j in 0..=8 {
            q10 += 0.05 * p * q[9 - j];
        }
        assert!((c.q[2].1 - q10).abs() < 1e-15);
        let sym = approx_model_coeffs(&defaults(InputShaping::symmetric(0.2)), &[1, 2, 3, 10, 11, 12], &[1]).unwrap();
        assert!(sym.q.iter().all(|e| e.1 == 0.0));
        assert!(sym.r[0].1 > 0.0);
    }

    #[test]
    fn approx_model_constant_without_input() {
        let cfg = defaults(InputShaping::asymmetric(0.2));
        let c = approx_model_coeffs(&cfg, &[1, 2, 3, 10, 11, 12], &[1, 2, 3]).unwrap();
        let s = simulate_approx_model(&c, &[0.0; 50]).unwrap();
        assert_eq!(s.start, 12);
        assert!(s.values.iter().all(|&v| v == c.p));
        let pred = c.predicted_capacities(1.0 / 3.0);
        assert!((pred.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
