use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::surrogate::ThresholdConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEntry {
    pub spec: String,
    /// Total degree of the chaos part.
    pub order: usize,
    pub raw: f64,
    pub thresholded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedEntry {
    pub spec: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMeta {
    pub enabled: bool,
    pub n_surrogates: usize,
    pub significance_pct: f64,
    pub factor: f64,
    pub seed: u64,
    pub prescreen: bool,
}

impl From<&ThresholdConfig> for ThresholdMeta {
    fn from(c: &ThresholdConfig) -> Self {
        ThresholdMeta {
            enabled: c.enabled,
            n_surrogates: c.n_surrogates,
            significance_pct: c.significance_pct,
            factor: c.factor,
            seed: c.seed,
            prescreen: c.prescreen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub version: String,
    pub rank: usize,
    pub total: f64,
    pub per_order_totals: BTreeMap<usize, f64>,
    pub threshold: ThresholdMeta,
    /// Sorted by order, then by raw capacity descending.
    pub entries: Vec<CapacityEntry>,
    pub skipped: Vec<SkippedEntry>,
    pub metadata: BTreeMap<String, String>,
}

impl CapacityReport {
    pub fn order_total(&self, order: usize) -> f64 {
        self.per_order_totals.get(&order).copied().unwrap_or(0.0)
    }

    pub fn entry(&self, spec: &str) -> Option<&CapacityEntry> {
        self.entries.iter().find(|e| e.spec == spec)
    }

    pub fn thresholded(&self, spec: &str) -> f64 {
        self.entry(spec).map_or(0.0, |e| e.thresholded)
    }

    /// Entries with a temporal factor (`cos@k` / `sin@k`).
    pub fn temporal_total(&self) -> f64 {
        crate::numeric::compensated_sum(
            self.entries
                .iter()
                .filter(|e| e.spec.contains("cos@") || e.spec.contains("sin@"))
                .map(|e| e.thresholded),
        )
    }
}
