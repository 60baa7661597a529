use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::report::{CapacityEntry, CapacityReport, SkippedEntry, ThresholdMeta};
use super::surrogate::{apply_threshold, gate, Gate, NullStats, ShuffleBank, Shuffles, ThresholdConfig};
use super::svd::SvdBasis;
use super::CapacityError;
use crate::numeric::{compensated_sum, derive_seed};
use crate::polychaos::{temporal_wave, ChaosSpec, PolyTable, PolynomialFamily, TemporalFactor};

/// Targets per GEMM batch.
const BATCH: usize = 64;

enum Outcome {
    Kept { raw: f64, thresholded: f64, gate: Option<Gate> },
    Skipped(String),
}

/// Sweep over `specs` where state row `i` corresponds to absolute input
/// time `start + i` in `table`.
pub fn capacity_sweep_table(
    basis: &SvdBasis,
    specs: &[ChaosSpec],
    table: &PolyTable,
    start: usize,
    threshold: &ThresholdConfig,
) -> CapacityReport {
    let t = basis.len();
    let mut waves: HashMap<TemporalFactor, Vec<f64>> = HashMap::new();
    for s in specs {
        if let Some(tf) = s.temporal() {
            waves.entry(tf).or_insert_with(|| temporal_wave(tf, t));
        }
    }

    let bank = if threshold.enabled && basis.rank > 0 {
        ShuffleBank::new(t, threshold.n_surrogates, threshold.seed)
    } else {
        None
    };
    let null = NullStats::new(basis);

    let outcomes: Vec<Vec<(usize, Outcome)>> = specs
        .par_chunks(BATCH)
        .enumerate()
        .map(|(ci, chunk)| {
            let base = ci * BATCH;
            let mut out = Vec::with_capacity(chunk.len());
            let mut block = DMatrix::<f64>::zeros(t, chunk.len());
            let mut live = Vec::with_capacity(chunk.len());
            for (j, spec) in chunk.iter().enumerate() {
                if let Err(e) = table.check_window(spec, start, start + t) {
                    out.push((base + j, Outcome::Skipped(e.to_string())));
                    continue;
                }
                let col = &mut block.as_mut_slice()[j * t..(j + 1) * t];
                table.fill_static(spec, start, col);
                if let Some(tf) = spec.temporal() {
                    for (v, w) in col.iter_mut().zip(&waves[&tf]) {
                        *v *= w;
                    }
                }
                let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    out.push((base + j, Outcome::Skipped("target has zero or non-finite norm".into())));
                    continue;
                }
                col.iter_mut().for_each(|v| *v /= norm);
                live.push(j);
            }
            if basis.rank == 0 {
                for &j in &live {
                    out.push((
                        base + j,
                        Outcome::Kept {
                            raw: 0.0,
                            thresholded: 0.0,
                            gate: None,
                        },
                    ));
                }
                return out;
            }
            let proj = crate::numeric::tr_mul_cols(&basis.p, block.as_slice(), chunk.len());
            for &j in &live {
                let raw = proj.column(j).iter().map(|x| x * x).sum::<f64>();
                let (thresholded, g) = if !threshold.enabled {
                    (raw, None)
                } else {
                    let phi = &block.as_slice()[j * t..(j + 1) * t];
                    let source = match &bank {
                        Some(b) => Shuffles::Bank(b),
                        None => Shuffles::Seeded(derive_seed(threshold.seed, &chunk[j].to_string())),
                    };
                    let g = gate(basis, &null, phi, raw, threshold, source);
                    let v = match g {
                        Gate::Decided { epsilon } => apply_threshold(raw, epsilon),
                        _ => 0.0,
                    };
                    (v, Some(g))
                };
                out.push((
                    base + j,
                    Outcome::Kept {
                        raw,
                        thresholded,
                        gate: g,
                    },
                ));
            }
            out
        })
        .collect();

    let mut flat: Vec<(usize, Outcome)> = outcomes.into_iter().flatten().collect();
    flat.sort_by_key(|(i, _)| *i);

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let (mut n_pre, mut n_early, mut n_full) = (0usize, 0usize, 0usize);
    for (i, o) in flat {
        match o {
            Outcome::Kept { raw, thresholded, gate } => {
                match gate {
                    Some(Gate::Prescreened) => n_pre += 1,
                    Some(Gate::RejectedEarly) => n_early += 1,
                    Some(Gate::Decided { .. }) => n_full += 1,
                    None => {}
                }
                entries.push(CapacityEntry {
                    spec: specs[i].to_string(),
                    order: specs[i].total_degree(),
                    raw,
                    thresholded,
                });
            }
            Outcome::Skipped(reason) => skipped.push(SkippedEntry {
                spec: specs[i].to_string(),
                reason,
            }),
        }
    }
    entries.sort_by(|a, b| {
        a.order
            .cmp(&b.order)
            .then(b.raw.total_cmp(&a.raw))
            .then(a.spec.cmp(&b.spec))
    });

    let mut per_order: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for e in &entries {
        per_order.entry(e.order).or_default().push(e.thresholded);
    }
    let per_order_totals: BTreeMap<usize, f64> = per_order
        .into_iter()
        .map(|(k, v)| (k, compensated_sum(v)))
        .collect();
    let total = compensated_sum(entries.iter().map(|e| e.thresholded));

    let mut metadata = BTreeMap::new();
    metadata.insert("rows".into(), t.to_string());
    metadata.insert("targets".into(), specs.len().to_string());
    metadata.insert("skipped".into(), skipped.len().to_string());
    metadata.insert("rank_tol".into(), basis.rank_tol.to_string());
    if threshold.enabled {
        let mode = if bank.is_some() { "shared_bank" } else { "per_target" };
        metadata.insert("surrogate_shuffles".into(), mode.into());
        metadata.insert("gate_prescreened".into(), n_pre.to_string());
        metadata.insert("gate_rejected_early".into(), n_early.to_string());
        metadata.insert("gate_full_surrogates".into(), n_full.to_string());
    }

    CapacityReport {
        version: crate::VERSION.to_string(),
        rank: basis.rank,
        total,
        per_order_totals,
        threshold: ThresholdMeta::from(threshold),
        entries,
        skipped,
        metadata,
    }
}

/// Builds the polynomial table for `family` on `zeta` and runs the sweep.
/// State row `i` pairs with `zeta[start + i]`'s time step.
pub fn capacity_sweep(
    basis: &SvdBasis,
    specs: &[ChaosSpec],
    family: &PolynomialFamily,
    zeta: &[f64],
    start: usize,
    threshold: &ThresholdConfig,
) -> Result<CapacityReport, CapacityError> {
    if specs.is_empty() {
        return Err(CapacityError::Shape("no targets to sweep".into()));
    }
    if start + basis.len() > zeta.len() {
        return Err(CapacityError::Shape(format!(
            "state spans steps {}..{} but the input has {} samples",
            start,
            start + basis.len(),
            zeta.len()
        )));
    }
    let need = specs.iter().map(|s| s.max_factor_degree()).max().unwrap_or(0);
    let table = PolyTable::new(family, zeta, need.min(family.max_degree()))?;
    Ok(capacity_sweep_table(basis, specs, &table, start, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{decompose, StateMatrix};
    use crate::distributions::{sample_stream, DistributionSpec};
    use crate::polychaos::enumerate_chaos;

    #[test]
    fn delay_line_has_unit_linear_memory() {
        let n = 3000;
        let zeta = sample_stream(&DistributionSpec::uniform(), n, 1).unwrap();
        // x_t = zeta_{t-1}; rows cover t = 10..n.
        let x: Vec<f64> = (10..n).map(|t| zeta[t - 1]).collect();
        let s = StateMatrix::from_column(&x, 10).unwrap().centered();
        let b = decompose(&s, 1e-10).unwrap();
        let specs = enumerate_chaos(2, 5, None);
        let rep = capacity_sweep(&b, &specs, &PolynomialFamily::Legendre, &zeta, 10, &ThresholdConfig::default())
            .unwrap();
        assert!((rep.thresholded("1@1") - 1.0).abs() < 1e-3);
        assert!((rep.total - rep.thresholded("1@1")).abs() < 1e-12);
        assert!(rep.total <= rep.rank as f64 + 1e-6);
    }

    #[test]
    fn zero_rank_state_reports_zero() {
        let zeta = sample_stream(&DistributionSpec::uniform(), 100, 1).unwrap();
        let s = StateMatrix::from_column(&[0.3; 90], 10).unwrap().centered();
        let b = decompose(&s, 1e-10).unwrap();
        assert_eq!(b.rank, 0);
        let specs = enumerate_chaos(2, 3, None);
        let rep = capacity_sweep(&b, &specs, &PolynomialFamily::Legendre, &zeta, 10, &ThresholdConfig::default())
            .unwrap();
        assert_eq!(rep.total, 0.0);
        assert_eq!(rep.entries.len(), specs.len());
    }

    #[test]
    fn bad_window_becomes_skipped_entry() {
        let zeta = sample_stream(&DistributionSpec::uniform(), 100, 1).unwrap();
        let x: Vec<f64> = (2..100).map(|t| zeta[t - 1]).collect();
        let s = StateMatrix::from_column(&x, 2).unwrap();
        let b = decompose(&s, 1e-10).unwrap();
        let specs = vec![ChaosSpec::linear(1), ChaosSpec::linear(5)];
        let rep = capacity_sweep(&b, &specs, &PolynomialFamily::Legendre, &zeta, 2, &ThresholdConfig::disabled())
            .unwrap();
        assert_eq!(rep.entries.len(), 1);
        assert_eq!(rep.skipped.len(), 1);
        assert_eq!(rep.skipped[0].spec, "1@5");
    }
}
