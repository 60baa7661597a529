//! Shuffle-surrogate significance thresholds.
//!
//! For each target the values are randomly permuted `n_surrogates` times,
//! destroying any temporal relation to the state while keeping the marginal
//! distribution. The threshold is `factor` times the upper
//! `significance_pct / 2` percent quantile of the surrogate capacities, and a
//! raw capacity survives only if it is strictly above it.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svd::SvdBasis;
use crate::numeric::derive_seed;
use crate::polychaos::TargetSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "n200")]
    pub n_surrogates: usize,
    #[serde(default = "one")]
    pub significance_pct: f64,
    #[serde(default = "two")]
    pub factor: f64,
    #[serde(default)]
    pub seed: u64,
    /// Zero a target without running surrogates when its raw capacity is
    /// below `factor` times the exact null expectation of a shuffled target.
    #[serde(default = "yes")]
    pub prescreen: bool,
}

fn yes() -> bool {
    true
}
fn n200() -> usize {
    200
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            enabled: true,
            n_surrogates: 200,
            significance_pct: 1.0,
            factor: 2.0,
            seed: 0,
            prescreen: true,
        }
    }
}

impl ThresholdConfig {
    pub fn disabled() -> Self {
        ThresholdConfig {
            enabled: false,
            ..Self::default()
        }
    }

    /// Rank (1-based, from the top) of the surrogate capacity used as the quantile.
    pub fn quantile_rank(&self) -> usize {
        let k = (self.n_surrogates as f64 * self.significance_pct / 200.0).ceil() as usize;
        k.clamp(1, self.n_surrogates.max(1))
    }
}

#[inline]
pub fn apply_threshold(raw: f64, epsilon: f64) -> f64 {
    if raw > epsilon {
        raw
    } else {
        0.0
    }
}

/// Exact mean capacity of a uniformly shuffled copy of `phi`:
/// `sum_j [S_pp S_ff / (T - 1) + (sum p_j sum phi / T)^2]`.
pub fn null_expectation(basis: &SvdBasis, phi: &[f64]) -> f64 {
    NullStats::new(basis).expectation(phi)
}

/// Per-column sums of the basis, so the null expectation costs `O(T)`
/// per target instead of `O(T r)`.
pub(crate) struct NullStats {
    /// `(sum p_j, centered sum of squares of p_j)`.
    cols: Vec<(f64, f64)>,
    t: usize,
}

impl NullStats {
    pub(crate) fn new(basis: &SvdBasis) -> Self {
        let t = basis.len();
        let tf = t as f64;
        let cols = basis
            .p
            .column_iter()
            .map(|col| {
                let sp: f64 = col.iter().sum();
                let mp = sp / tf;
                (sp, col.iter().map(|x| (x - mp) * (x - mp)).sum())
            })
            .collect();
        NullStats { cols, t }
    }

    pub(crate) fn expectation(&self, phi: &[f64]) -> f64 {
        let t = self.t;
        if t < 2 || self.cols.is_empty() {
            return 0.0;
        }
        let tf = t as f64;
        let sf: f64 = phi.iter().sum();
        let mf = sf / tf;
        let sff: f64 = phi.iter().map(|x| (x - mf) * (x - mf)).sum();
        self.cols
            .iter()
            .map(|&(sp, spp)| spp * sff / (tf - 1.0) + (sp * sf / tf).powi(2))
            .sum()
    }
}

const BLOCK: usize = 8;

/// Permutations shared by every target of a sweep, drawn once from the
/// master seed. Gathering through a stored permutation is roughly ten
/// times cheaper than shuffling each target afresh.
pub(crate) struct ShuffleBank {
    perms: Vec<Vec<u32>>,
}

impl ShuffleBank {
    /// Storage cap in indices (256 MiB); larger sweeps shuffle per target.
    const MAX_ENTRIES: usize = 1 << 26;

    pub(crate) fn new(t: usize, n: usize, seed: u64) -> Option<Self> {
        if t > u32::MAX as usize || t.saturating_mul(n) > Self::MAX_ENTRIES {
            return None;
        }
        let perms = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("shuffle:{k}")));
                let mut p: Vec<u32> = (0..t as u32).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        Some(ShuffleBank { perms })
    }
}

/// Where surrogate permutations come from.
#[derive(Clone, Copy)]
pub(crate) enum Shuffles<'a> {
    /// Fresh shuffles from a per-target seed.
    Seeded(u64),
    Bank(&'a ShuffleBank),
}

/// Streams surrogate capacities in blocks. Returns the running top-`k`
/// values (descending) after each block to `keep_going`, which may stop early.
fn run_surrogates(
    basis: &SvdBasis,
    phi: &[f64],
    n: usize,
    k: usize,
    source: Shuffles<'_>,
    mut keep_going: impl FnMut(&[f64]) -> bool,
) -> Vec<f64> {
    let t = phi.len();
    let mut rng = match source {
        Shuffles::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Shuffles::Bank(_) => None,
    };
    let n = match source {
        Shuffles::Bank(b) => n.min(b.perms.len()),
        Shuffles::Seeded(_) => n,
    };
    let mut top: Vec<f64> = Vec::with_capacity(k + BLOCK);
    let mut done = 0;
    let mut block = DMatrix::<f64>::zeros(t, BLOCK);
    while done < n {
        let b = BLOCK.min(n - done);
        for j in 0..b {
            let s = &mut block.as_mut_slice()[j * t..(j + 1) * t];
            match (&mut rng, source) {
                (Some(r), _) => {
                    s.copy_from_slice(phi);
                    s.shuffle(r);
                }
                (None, Shuffles::Bank(bank)) => {
                    for (dst, &i) in s.iter_mut().zip(&bank.perms[done + j]) {
                        *dst = phi[i as usize];
                    }
                }
                (None, Shuffles::Seeded(_)) => unreachable!(),
            }
        }
        let c = crate::numeric::tr_mul_cols(&basis.p, block.as_slice(), b);
        for j in 0..b {
            let v: f64 = c.column(j).iter().map(|x| x * x).sum();
            top.push(v);
        }
        top.sort_by(|a, b| b.total_cmp(a));
        top.truncate(k);
        done += b;
        if !keep_going(&top) {
            break;
        }
    }
    top
}

/// `factor` times the selected upper quantile of shuffled-target capacities.
pub fn surrogate_threshold(
    basis: &SvdBasis,
    target: &TargetSeries,
    n_surrogates: usize,
    significance_pct: f64,
    factor: f64,
    seed: u64,
) -> f64 {
    let cfg = ThresholdConfig {
        n_surrogates,
        significance_pct,
        factor,
        ..ThresholdConfig::default()
    };
    if basis.rank == 0 || n_surrogates == 0 {
        return 0.0;
    }
    let k = cfg.quantile_rank();
    let top = run_surrogates(basis, &target.values, n_surrogates, k, Shuffles::Seeded(seed), |_| true);
    factor * top.get(k - 1).copied().unwrap_or(0.0)
}

/// Outcome of gating one raw capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Gate {
    /// Below the prescreen bound; no surrogates were drawn.
    Prescreened,
    /// Rejected as soon as enough surrogates exceeded `raw / factor`.
    RejectedEarly,
    /// All surrogates drawn; `epsilon` is the full threshold.
    Decided { epsilon: f64 },
}

/// Same decision as `apply_threshold(raw, surrogate_threshold(..))`, but
/// stops as soon as the outcome is certain.
pub(crate) fn gate(
    basis: &SvdBasis,
    null: &NullStats,
    phi: &[f64],
    raw: f64,
    cfg: &ThresholdConfig,
    source: Shuffles<'_>,
) -> Gate {
    if cfg.prescreen && raw <= cfg.factor * null.expectation(phi) {
        return Gate::Prescreened;
    }
    let k = cfg.quantile_rank();
    let bar = raw / cfg.factor;
    let mut early = false;
    let top = run_surrogates(basis, phi, cfg.n_surrogates, k, source, |top| {
        // Top-k only grows, so once the k-th largest reaches raw/factor the
        // target can never pass.
        if top.len() == k && top[k - 1] >= bar {
            early = true;
            false
        } else {
            true
        }
    });
    if early {
        Gate::RejectedEarly
    } else {
        Gate::Decided {
            epsilon: cfg.factor * top.get(k - 1).copied().unwrap_or(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{compute_capacity, decompose, StateMatrix};
    use crate::distributions::{sample_stream, DistributionSpec};
    use crate::polychaos::ChaosSpec;

    fn basis_of(rows: usize, cols: usize, seed: u64) -> (SvdBasis, Vec<f64>) {
        let v = sample_stream(&DistributionSpec::uniform(), rows * cols, seed).unwrap();
        let s = StateMatrix::new(DMatrix::from_column_slice(rows, cols, &v), 0).unwrap();
        (decompose(&s, 1e-10).unwrap(), v)
    }

    fn tgt(v: Vec<f64>) -> TargetSeries {
        TargetSeries::normalized(v, ChaosSpec::linear(1)).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(apply_threshold(0.3, 0.1), 0.3);
        assert_eq!(apply_threshold(0.05, 0.1), 0.0);
        assert_eq!(apply_threshold(0.1, 0.1), 0.0);
    }

    #[test]
    fn quantile_rank_for_defaults_is_the_maximum() {
        assert_eq!(ThresholdConfig::default().quantile_rank(), 1);
        let c = ThresholdConfig {
            n_surrogates: 1000,
            significance_pct: 5.0,
            ..Default::default()
        };
        assert_eq!(c.quantile_rank(), 25);
    }

    #[test]
    fn noise_state_is_zeroed_and_self_target_survives() {
        let t = 4000;
        let (b, x) = basis_of(t, 1, 3);
        let z = tgt(sample_stream(&DistributionSpec::uniform(), t, 4).unwrap());
        let raw = compute_capacity(&b, &z).unwrap();
        let eps = surrogate_threshold(&b, &z, 200, 1.0, 2.0, 9);
        assert!(eps > 0.0 && eps < 50.0 / t as f64, "eps {eps}");
        assert_eq!(apply_threshold(raw, eps), 0.0);
        let own = tgt(x);
        let raw_own = compute_capacity(&b, &own).unwrap();
        assert!((raw_own - 1.0).abs() < 1e-12);
        assert!(raw_own > surrogate_threshold(&b, &own, 200, 1.0, 2.0, 9));
    }

    #[test]
    fn deterministic_given_seed() {
        let (b, _) = basis_of(500, 2, 1);
        let z = tgt(sample_stream(&DistributionSpec::uniform(), 500, 2).unwrap());
        assert_eq!(
            surrogate_threshold(&b, &z, 50, 1.0, 2.0, 77).to_bits(),
            surrogate_threshold(&b, &z, 50, 1.0, 2.0, 77).to_bits()
        );
    }

    #[test]
    fn null_expectation_matches_surrogate_mean() {
        let t = 300;
        let (b, _) = basis_of(t, 3, 5);
        let z: Vec<f64> = sample_stream(&DistributionSpec::Gamma { alpha: 1.0 }, t, 6).unwrap();
        let phi = tgt(z);
        let exact = null_expectation(&b, &phi.values);
        let n = 4000;
        let all = run_surrogates(&b, &phi.values, n, n, Shuffles::Seeded(8), |_| true);
        let mean = all.iter().sum::<f64>() / n as f64;
        let sd = (all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mean - exact).abs() < 5.0 * sd / (n as f64).sqrt(), "{mean} vs {exact}");
    }

    #[test]
    fn gate_agrees_with_full_threshold() {
        let t = 2000;
        let (b, x) = basis_of(t, 2, 11);
        let cfg = ThresholdConfig {
            prescreen: false,
            ..Default::default()
        };
        for (i, mix) in [0.0, 0.02, 0.05, 0.1, 1.0].iter().enumerate() {
            let noise = sample_stream(&DistributionSpec::uniform(), t, 40 + i as u64).unwrap();
            let z = tgt(noise.iter().zip(&x).map(|(n, s)| n + mix * s).collect());
            let raw = compute_capacity(&b, &z).unwrap();
            let eps = surrogate_threshold(&b, &z, 200, 1.0, 2.0, 5);
            let full = apply_threshold(raw, eps);
            let fast = match gate(&b, &NullStats::new(&b), &z.values, raw, &cfg, Shuffles::Seeded(5)) {
                Gate::Decided { epsilon } => apply_threshold(raw, epsilon),
                _ => 0.0,
            };
            assert_eq!(full, fast, "mix {mix}");
        }
    }

    #[test]
    fn bank_and_fresh_shuffles_agree_in_distribution() {
        let t = 3000;
        let (b, _) = basis_of(t, 2, 21);
        let phi = tgt(sample_stream(&DistributionSpec::uniform(), t, 22).unwrap());
        let exact = null_expectation(&b, &phi.values);
        let bank = ShuffleBank::new(t, 400, 1).unwrap();
        let all = run_surrogates(&b, &phi.values, 400, 400, Shuffles::Bank(&bank), |_| true);
        assert_eq!(all.len(), 400);
        let mean = all.iter().sum::<f64>() / 400.0;
        assert!((mean - exact).abs() < 0.2 * exact, "{mean} vs {exact}");
        assert!(ShuffleBank::new(1 << 20, 200, 1).is_none());
    }
}
