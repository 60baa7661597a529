//! Small numeric helpers shared across modules.

use nalgebra::DMatrix;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::new();
    for x in xs {
        s.add(x);
    }
    s.value()
}

pub fn mean(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    compensated_sum(xs.iter().map(|x| (x - m) * (x - m))) / xs.len() as f64
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// splitmix64 finalizer; turns correlated seeds into independent-looking ones.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a, stable across platforms and releases.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn derive_seed(master: u64, key: &str) -> u64 {
    splitmix64(master ^ fnv1a(key.as_bytes()))
}

/// Thin SVD `m = U diag(s) V^T` with `s` descending. Delegates to faer;
/// nalgebra's bidiagonal SVD returns inconsistent factors for some
/// rank-deficient inputs.
pub fn thin_svd(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = fm.thin_svd().ok()?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let k = r.min(c);
    Some((
        DMatrix::from_fn(r, k, |i, j| u[(i, j)]),
        (0..k).map(|i| s[i]).collect(),
        DMatrix::from_fn(c, k, |i, j| v[(i, j)]),
    ))
}

/// `a^T b` with `b` given as `cols` contiguous columns of length `a.nrows()`.
/// Goes through faer's blocked kernel, several times faster than
/// nalgebra's `tr_mul` for the tall-skinny products in capacity sweeps.
pub fn tr_mul_cols(a: &DMatrix<f64>, b: &[f64], cols: usize) -> DMatrix<f64> {
    let (t, r) = a.shape();
    let lhs = faer::MatRef::from_column_major_slice(a.as_slice(), t, r);
    let rhs = faer::MatRef::from_column_major_slice(&b[..t * cols], t, cols);
    let mut out = DMatrix::<f64>::zeros(r, cols);
    let dst = faer::MatMut::from_column_major_slice_mut(out.as_mut_slice(), r, cols);
    faer::linalg::matmul::matmul(dst, faer::Accum::Replace, lhs.transpose(), rhs, 1.0, faer::Par::Seq);
    out
}
