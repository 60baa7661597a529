use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::CapacityError;

/// `T x N` state time series, one row per time step. Row `i` holds the
/// state at absolute step `washout + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    data: DMatrix<f64>,
    pub washout: usize,
    pub labels: Option<Vec<String>>,
    /// Free-form provenance (initial state, detrend components, ...).
    pub metadata: BTreeMap<String, String>,
}

impl StateMatrix {
    pub fn new(data: DMatrix<f64>, washout: usize) -> Result<Self, CapacityError> {
        let (t, n) = data.shape();
        if n == 0 {
            return Err(CapacityError::Shape("state has no columns".into()));
        }
        if t <= n {
            return Err(CapacityError::Shape(format!(
                "state needs more rows than columns, got {t} x {n}"
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(CapacityError::Data(format!(
                "non-finite entry at row {}, column {}",
                k % t,
                k / t
            )));
        }
        Ok(StateMatrix {
            data,
            washout,
            labels: None,
            metadata: BTreeMap::new(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], washout: usize) -> Result<Self, CapacityError> {
        let t = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(CapacityError::Shape(format!("row {i} has a different width")));
        }
        Self::new(DMatrix::from_fn(t, n, |i, j| rows[i][j]), washout)
    }

    pub fn from_column(col: &[f64], washout: usize) -> Result<Self, CapacityError> {
        Self::new(DMatrix::from_column_slice(col.len(), 1, col), washout)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).iter().copied().collect()
    }

    /// Absolute time span `(washout, washout + rows)` covered by the data.
    pub fn window(&self) -> (usize, usize) {
        (self.washout, self.washout + self.rows())
    }

    /// Drops the first `k` rows, advancing the washout accordingly.
    pub fn skip_rows(&self, k: usize) -> Result<Self, CapacityError> {
        let t = self.rows();
        if k >= t {
            return Err(CapacityError::Shape(format!("cannot drop {k} of {t} rows")));
        }
        let data = self.data.rows(k, t - k).into_owned();
        let mut out = Self::new(data, self.washout + k)?;
        out.labels = self.labels.clone();
        out.metadata = self.metadata.clone();
        Ok(out)
    }

    /// Column means removed.
    pub fn centered(&self) -> Self {
        let mut data = self.data.clone();
        for mut col in data.column_iter_mut() {
            let m = crate::numeric::compensated_sum(col.iter().copied()) / col.len() as f64;
            col.add_scalar_mut(-m);
        }
        StateMatrix {
            data,
            washout: self.washout,
            labels: self.labels.clone(),
            metadata: self.metadata.clone(),
        }
    }
}
