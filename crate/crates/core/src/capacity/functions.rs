use super::engine::capacity_sweep_table;
use super::surrogate::ThresholdConfig;
use super::svd::SvdBasis;
use crate::polychaos::{ChaosSpec, ChaosTerm, Phase, PolyTable, TemporalFactor};

/// First-degree capacity against delay `1..=max_delay`, optionally times a
/// temporal factor.
pub fn memory_function(
    basis: &SvdBasis,
    table: &PolyTable,
    start: usize,
    max_delay: usize,
    temporal: Option<TemporalFactor>,
    threshold: &ThresholdConfig,
) -> Vec<(usize, f64)> {
    let specs: Vec<ChaosSpec> = (1..=max_delay)
        .map(|s| {
            ChaosSpec::new(vec![ChaosTerm { delay: s, degree: 1 }], temporal).expect("valid delay")
        })
        .collect();
    let rep = capacity_sweep_table(basis, &specs, table, start, threshold);
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1, rep.thresholded(&s.to_string())))
        .collect()
}

/// First-degree TIPC at a fixed delay across temporal harmonics.
pub fn tipc_spectrum(
    basis: &SvdBasis,
    table: &PolyTable,
    start: usize,
    delay: usize,
    harmonics: &[usize],
    threshold: &ThresholdConfig,
) -> Vec<(usize, f64, f64)> {
    let mut specs = Vec::with_capacity(2 * harmonics.len());
    for &h in harmonics {
        for phase in [Phase::Cos, Phase::Sin] {
            specs.push(
                ChaosSpec::new(
                    vec![ChaosTerm { delay, degree: 1 }],
                    Some(TemporalFactor { harmonic: h, phase }),
                )
                .expect("valid harmonic"),
            );
        }
    }
    let rep = capacity_sweep_table(basis, &specs, table, start, threshold);
    harmonics
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            (
                h,
                rep.thresholded(&specs[2 * i].to_string()),
                rep.thresholded(&specs[2 * i + 1].to_string()),
            )
        })
        .collect()
}
