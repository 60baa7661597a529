use nalgebra::{DMatrix, DVector};

use super::state::StateMatrix;
use super::CapacityError;
use crate::polychaos::TargetSeries;

/// Thin SVD `X = P diag(sigma) Q^T` truncated to the numerical rank.
#[derive(Debug, Clone)]
pub struct SvdBasis {
    /// `T x r`, orthonormal columns.
    pub p: DMatrix<f64>,
    pub sigma: Vec<f64>,
    /// `N x r`.
    pub q: DMatrix<f64>,
    pub rank: usize,
    pub rank_tol: f64,
}

/// Relative singular-value cutoff used by the pipelines, `1e-10 * sqrt(T)`.
pub fn default_rank_tol(t: usize) -> f64 {
    (1e-10 * (t as f64).sqrt()).min(0.5)
}

/// QR of the tall state first, then SVD of the small triangular factor;
/// this avoids forming `X^T X` and keeps memory at `O(T N)`.
pub fn decompose(state: &StateMatrix, rank_tol: f64) -> Result<SvdBasis, CapacityError> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(CapacityError::Data(format!("rank_tol must lie in (0, 1), got {rank_tol}")));
    }
    let x = state.data();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(CapacityError::Data("state contains non-finite entries".into()));
    }
    let t = x.nrows();
    let qr = x.clone().qr();
    let q_thin = qr.q();
    let r = qr.r();
    let (u, s, v) = crate::numeric::thin_svd(&r)
        .ok_or_else(|| CapacityError::Data("SVD failed to converge".into()))?;
    let s1 = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().take_while(|&&si| s1 > 0.0 && si > rank_tol * s1).count();
    let u_r = u.columns(0, rank).into_owned();
    let q = v.columns(0, rank).into_owned();
    let p = &q_thin * u_r;
    debug_assert_eq!(p.nrows(), t);
    Ok(SvdBasis {
        p,
        sigma: s[..rank].to_vec(),
        q,
        rank,
        rank_tol,
    })
}

impl SvdBasis {
    pub fn len(&self) -> usize {
        self.p.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.p.nrows() == 0
    }

    /// Squared norm of the projection of a unit vector onto the column space.
    pub fn projected_energy(&self, phi: &[f64]) -> f64 {
        if self.rank == 0 {
            return 0.0;
        }
        let v = DVector::from_column_slice(phi);
        let c = self.p.tr_mul(&v);
        c.iter().map(|x| x * x).sum()
    }
}

/// `sum_j (p_j^T phi)^2` for a normalized target.
pub fn compute_capacity(basis: &SvdBasis, target: &TargetSeries) -> Result<f64, CapacityError> {
    if target.values.len() != basis.len() {
        return Err(CapacityError::Shape(format!(
            "target has {} samples, state has {}",
            target.values.len(),
            basis.len()
        )));
    }
    Ok(basis.projected_energy(&target.values))
}
