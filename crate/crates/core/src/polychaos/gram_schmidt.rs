//! Data-driven orthogonal basis fitted to input samples.
//!
//! Degree `n` is built from `z * psi_{n-1}` in the standardized variable
//! `z = (zeta - shift) / scale` and then re-projected twice against all lower
//! degrees. Starting from `z * psi_{n-1}` instead of `z^n` keeps the moment
//! vectors well conditioned at degree 8 and above; the span is the same, so
//! after rescaling by `scale^n` each polynomial is still monic in `zeta^n`.

use super::PolyError;

/// Relative norm below which a new direction counts as dependent.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidtBasis {
    shift: f64,
    scale: f64,
    /// `proj[n-1][i]`: coefficient of `phi_i` subtracted from `z * phi_{n-1}`
    /// when forming `phi_n`, for `i < n`. `phi` is monic in `z`.
    proj: Vec<Vec<f64>>,
}

pub fn fit_gram_schmidt(samples: &[f64], max_degree: usize) -> Result<GramSchmidtBasis, PolyError> {
    if max_degree == 0 {
        return Err(PolyError::Degenerate {
            degree: 0,
            reason: "max_degree must be at least 1".into(),
        });
    }
    let t = samples.len();
    if t <= max_degree {
        return Err(PolyError::Degenerate {
            degree: t,
            reason: format!("{t} samples cannot support degree {max_degree}"),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(PolyError::Degenerate {
            degree: 1,
            reason: "non-finite sample".into(),
        });
    }
    let tf = t as f64;
    let shift = samples.iter().sum::<f64>() / tf;
    let var = samples.iter().map(|x| (x - shift) * (x - shift)).sum::<f64>() / tf;
    if !(var > 0.0) || var.sqrt() <= 1e-12 * shift.abs().max(1.0) {
        return Err(PolyError::Degenerate {
            degree: 1,
            reason: "samples are constant".into(),
        });
    }
    let scale = var.sqrt();
    let z: Vec<f64> = samples.iter().map(|x| (x - shift) / scale).collect();

    let mut phis: Vec<Vec<f64>> = vec![vec![1.0; t]];
    let mut norms2 = vec![tf];
    let mut proj = Vec::with_capacity(max_degree);
    for n in 1..=max_degree {
        let mut v: Vec<f64> = phis[n - 1].iter().zip(&z).map(|(p, zi)| p * zi).collect();
        let start_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut coeffs = vec![0.0; n];
        for _pass in 0..2 {
            for i in 0..n {
                let c = phis[i].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / norms2[i];
                coeffs[i] += c;
                for (vk, pk) in v.iter_mut().zip(&phis[i]) {
                    *vk -= c * pk;
                }
            }
        }
        let nrm2 = v.iter().map(|x| x * x).sum::<f64>();
        if !(nrm2.sqrt() > DEGENERACY_TOL * start_norm) {
            return Err(PolyError::Degenerate {
                degree: n,
                reason: format!(
                    "new direction has relative norm {:.3e}; the samples take too few distinct values",
                    nrm2.sqrt() / start_norm
                ),
            });
        }
        norms2.push(nrm2);
        phis.push(v);
        proj.push(coeffs);
    }
    Ok(GramSchmidtBasis { shift, scale, proj })
}

impl GramSchmidtBasis {
    pub fn max_degree(&self) -> usize {
        self.proj.len()
    }

    pub fn eval_all(&self, zeta: f64, out: &mut [f64]) {
        debug_assert!(out.len() <= self.max_degree() + 1);
        let z = (zeta - self.shift) / self.scale;
        out[0] = 1.0;
        for n in 1..out.len() {
            let mut v = z * out[n - 1];
            for (i, c) in self.proj[n - 1].iter().enumerate() {
                v -= c * out[i];
            }
            out[n] = v;
        }
        let mut s = 1.0;
        for o in out.iter_mut().skip(1) {
            s *= self.scale;
            *o *= s;
        }
    }

    /// Coefficients of each basis polynomial in powers of `zeta`:
    /// `result[n][k]` multiplies `zeta^k`, and `result[n][n] == 1`.
    pub fn monomial_coefficients(&self) -> Vec<Vec<f64>> {
        // First in powers of z, then substitute z = (zeta - shift) / scale.
        let d = self.max_degree();
        let mut in_z: Vec<Vec<f64>> = vec![vec![1.0]];
        for n in 1..=d {
            let mut c = vec![0.0; n + 1];
            for (k, a) in in_z[n - 1].iter().enumerate() {
                c[k + 1] += a;
            }
            for (i, p) in self.proj[n - 1].iter().enumerate() {
                for (k, a) in in_z[i].iter().enumerate() {
                    c[k] -= p * a;
                }
            }
            in_z.push(c);
        }
        in_z.iter()
            .enumerate()
            .map(|(n, cz)| {
                let mut out = vec![0.0; n + 1];
                // (zeta - shift)^k / scale^k, scaled by scale^n overall.
                for (k, &a) in cz.iter().enumerate() {
                    let factor = a * self.scale.powi((n - k) as i32);
                    for j in 0..=k {
                        let binom = binomial(k, j);
                        out[j] += factor * binom * (-self.shift).powi((k - j) as i32);
                    }
                }
                out
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}
