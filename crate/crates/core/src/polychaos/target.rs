use std::f64::consts::PI;

use super::families::PolynomialFamily;
use super::spec::{ChaosSpec, Phase, TemporalFactor};
use super::PolyError;

/// Univariate polynomial values of one input stream, `values[n][t]` for
/// degrees `0..=max_degree`, so multivariate targets become elementwise
/// products of shifted rows.
#[derive(Debug, Clone)]
pub struct PolyTable {
    values: Vec<Vec<f64>>,
}

impl PolyTable {
    pub fn new(family: &PolynomialFamily, zeta: &[f64], max_degree: usize) -> Result<Self, PolyError> {
        let cap = family.max_degree();
        if max_degree > cap {
            return Err(PolyError::DegreeOutOfRange {
                family: family.name().to_string(),
                degree: max_degree,
                max: cap,
            });
        }
        let mut values = vec![vec![0.0; zeta.len()]; max_degree + 1];
        let mut buf = vec![0.0; max_degree + 1];
        for (t, &z) in zeta.iter().enumerate() {
            family.eval_all(z, &mut buf);
            for n in 0..=max_degree {
                values[n][t] = buf[n];
            }
        }
        Ok(PolyTable { values })
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn row(&self, degree: usize) -> &[f64] {
        &self.values[degree]
    }

    pub fn check_window(&self, spec: &ChaosSpec, start: usize, end: usize) -> Result<(), PolyError> {
        let w = |reason: String| PolyError::Window {
            spec: spec.to_string(),
            start,
            end,
            reason,
        };
        if end <= start {
            return Err(w("window is empty".into()));
        }
        if end > self.len() {
            return Err(w(format!("input has only {} samples", self.len())));
        }
        if start < spec.max_delay() {
            return Err(w(format!("delay {} reaches before the input", spec.max_delay())));
        }
        if spec.max_factor_degree() > self.max_degree() {
            return Err(PolyError::DegreeOutOfRange {
                family: "table".into(),
                degree: spec.max_factor_degree(),
                max: self.max_degree(),
            });
        }
        Ok(())
    }

    /// Writes the un-normalized product of chaos factors for absolute times
    /// `start..start + out.len()`. Temporal factors are not applied here.
    pub fn fill_static(&self, spec: &ChaosSpec, start: usize, out: &mut [f64]) {
        let len = out.len();
        let mut terms = spec.terms().iter();
        match terms.next() {
            None => out.fill(1.0),
            Some(t) => {
                let off = start - t.delay;
                out.copy_from_slice(&self.values[t.degree][off..off + len]);
            }
        }
        for t in terms {
            let off = start - t.delay;
            for (o, v) in out.iter_mut().zip(&self.values[t.degree][off..off + len]) {
                *o *= v;
            }
        }
    }

    /// Un-normalized target including its temporal factor.
    pub fn fill(&self, spec: &ChaosSpec, start: usize, out: &mut [f64]) {
        self.fill_static(spec, start, out);
        if let Some(tf) = spec.temporal() {
            let len = out.len();
            for (i, o) in out.iter_mut().enumerate() {
                *o *= temporal_value(tf, i, len);
            }
        }
    }

    pub fn target(&self, spec: &ChaosSpec, start: usize, end: usize) -> Result<TargetSeries, PolyError> {
        self.check_window(spec, start, end)?;
        let mut values = vec![0.0; end - start];
        self.fill(spec, start, &mut values);
        TargetSeries::normalized(values, spec.clone())
    }
}

/// `cos(k Omega i)` or `sin(k Omega i)` with `Omega = 2 pi / len`; the
/// angle is reduced modulo the period before evaluation.
#[inline]
pub fn temporal_value(tf: TemporalFactor, i: usize, len: usize) -> f64 {
    let r = ((tf.harmonic as u128 * i as u128) % len as u128) as f64;
    let a = 2.0 * PI * r / len as f64;
    match tf.phase {
        Phase::Cos => a.cos(),
        Phase::Sin => a.sin(),
    }
}

pub fn temporal_wave(tf: TemporalFactor, len: usize) -> Vec<f64> {
    (0..len).map(|i| temporal_value(tf, i, len)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSeries {
    pub values: Vec<f64>,
    pub spec: ChaosSpec,
    /// Euclidean norm before normalization.
    pub norm: f64,
}

impl TargetSeries {
    pub fn normalized(mut values: Vec<f64>, spec: ChaosSpec) -> Result<Self, PolyError> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(PolyError::DegenerateTarget { spec: spec.to_string() });
        }
        for v in &mut values {
            *v /= norm;
        }
        Ok(TargetSeries { values, spec, norm })
    }
}

/// Builds one normalized target over the absolute window `start..end` of `zeta`.
pub fn build_target(
    spec: &ChaosSpec,
    family: &PolynomialFamily,
    zeta: &[f64],
    window: (usize, usize),
) -> Result<TargetSeries, PolyError> {
    let (start, end) = window;
    if start < spec.max_delay() || end > zeta.len() || end <= start {
        return Err(PolyError::Window {
            spec: spec.to_string(),
            start,
            end,
            reason: "window must satisfy max_delay <= start < end <= len".into(),
        });
    }
    let lo = start - spec.max_delay();
    let table = PolyTable::new(family, &zeta[lo..end], spec.max_factor_degree())?;
    table.target(spec, start - lo, end - lo)
}
