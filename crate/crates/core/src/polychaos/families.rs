use serde::{Deserialize, Serialize};

use super::gram_schmidt::{fit_gram_schmidt, GramSchmidtBasis};
use super::PolyError;
use crate::distributions::DistributionSpec;

pub const DEFAULT_MAX_DEGREE: usize = 12;

/// Family selection as it appears in configuration. `GramSchmidt` carries
/// no coefficients; they are fitted from the input samples by [`FamilySpec::build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Hermite,
    Laguerre {
        #[serde(default = "one")]
        alpha: f64,
    },
    Jacobi {
        #[serde(default = "quarter")]
        alpha: f64,
        #[serde(default = "quarter")]
        beta: f64,
    },
    Legendre,
    Charlier {
        #[serde(default = "six")]
        a: f64,
    },
    Krawtchouk {
        #[serde(default = "half")]
        p: f64,
        #[serde(default = "ten")]
        n: u64,
    },
    Meixner {
        #[serde(default = "fifth")]
        c: f64,
        #[serde(default = "tenf")]
        beta: f64,
    },
    /// Parameterized by the hypergeometric urn: `alpha = -m - 1`, `beta = -n - 1`.
    Hahn {
        #[serde(default = "hundred")]
        m: u64,
        #[serde(default = "fifty")]
        n: u64,
        #[serde(default = "twenty")]
        draws: u64,
    },
    GramSchmidt {
        #[serde(default = "eight")]
        max_degree: usize,
    },
}

fn one() -> f64 {
    1.0
}
fn quarter() -> f64 {
    -0.25
}
fn six() -> f64 {
    6.0
}
fn half() -> f64 {
    0.5
}
fn ten() -> u64 {
    10
}
fn fifth() -> f64 {
    0.2
}
fn tenf() -> f64 {
    10.0
}
fn hundred() -> u64 {
    100
}
fn fifty() -> u64 {
    50
}
fn twenty() -> u64 {
    20
}
fn eight() -> usize {
    8
}

impl FamilySpec {
    /// Resolves to an evaluable family. Askey families ignore `samples`.
    pub fn build(&self, samples: &[f64]) -> Result<PolynomialFamily, PolyError> {
        let fam = match *self {
            FamilySpec::Hermite => PolynomialFamily::Hermite,
            FamilySpec::Laguerre { alpha } => PolynomialFamily::Laguerre { alpha },
            FamilySpec::Jacobi { alpha, beta } => PolynomialFamily::Jacobi { alpha, beta },
            FamilySpec::Legendre => PolynomialFamily::Legendre,
            FamilySpec::Charlier { a } => PolynomialFamily::Charlier { a },
            FamilySpec::Krawtchouk { p, n } => PolynomialFamily::Krawtchouk { p, n },
            FamilySpec::Meixner { c, beta } => PolynomialFamily::Meixner { c, beta },
            FamilySpec::Hahn { m, n, draws } => PolynomialFamily::Hahn { m, n, draws },
            FamilySpec::GramSchmidt { max_degree } => {
                return Ok(PolynomialFamily::GramSchmidt(fit_gram_schmidt(samples, max_degree)?))
            }
        };
        fam.validate()?;
        Ok(fam)
    }

    /// The input law each Askey family is orthogonal under.
    pub fn matched_distribution(&self) -> Option<DistributionSpec> {
        Some(match *self {
            FamilySpec::Hermite => DistributionSpec::standard_gaussian(),
            FamilySpec::Laguerre { alpha } => DistributionSpec::Gamma { alpha },
            FamilySpec::Jacobi { alpha, beta } => DistributionSpec::Beta { alpha, beta },
            FamilySpec::Legendre => DistributionSpec::uniform(),
            FamilySpec::Charlier { a } => DistributionSpec::Poisson { a },
            FamilySpec::Krawtchouk { p, n } => DistributionSpec::Binomial { p, n },
            FamilySpec::Meixner { c, beta } => DistributionSpec::NegativeBinomial { c, beta },
            FamilySpec::Hahn { m, n, draws } => DistributionSpec::Hypergeometric { m, n, draws },
            FamilySpec::GramSchmidt { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolynomialFamily {
    Hermite,
    Laguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
    Legendre,
    Charlier { a: f64 },
    Krawtchouk { p: f64, n: u64 },
    Meixner { c: f64, beta: f64 },
    Hahn { m: u64, n: u64, draws: u64 },
    GramSchmidt(GramSchmidtBasis),
}

fn bad(family: &'static str, field: &'static str, reason: &str) -> PolyError {
    PolyError::InvalidParameter {
        family,
        field,
        reason: reason.to_string(),
    }
}

/// `binom(y, k)` for real `y`, via the falling product.
fn gen_binom(y: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (y - j as f64) / (j + 1) as f64;
    }
    acc
}

fn binom(n: usize, k: usize) -> f64 {
    gen_binom(n as f64, k)
}

impl PolynomialFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PolynomialFamily::Hermite => "hermite",
            PolynomialFamily::Laguerre { .. } => "laguerre",
            PolynomialFamily::Jacobi { .. } => "jacobi",
            PolynomialFamily::Legendre => "legendre",
            PolynomialFamily::Charlier { .. } => "charlier",
            PolynomialFamily::Krawtchouk { .. } => "krawtchouk",
            PolynomialFamily::Meixner { .. } => "meixner",
            PolynomialFamily::Hahn { .. } => "hahn",
            PolynomialFamily::GramSchmidt(_) => "gram_schmidt",
        }
    }

    pub fn validate(&self) -> Result<(), PolyError> {
        let name = self.name();
        match *self {
            PolynomialFamily::Laguerre { alpha } if !(alpha > -1.0) => Err(bad(name, "alpha", "must exceed -1")),
            PolynomialFamily::Jacobi { alpha, .. } if !(alpha > -1.0) => Err(bad(name, "alpha", "must exceed -1")),
            PolynomialFamily::Jacobi { beta, .. } if !(beta > -1.0) => Err(bad(name, "beta", "must exceed -1")),
            PolynomialFamily::Charlier { a } if !(a > 0.0) => Err(bad(name, "a", "must be positive")),
            PolynomialFamily::Krawtchouk { p, .. } if !(p > 0.0 && p < 1.0) => {
                Err(bad(name, "p", "must lie in (0, 1)"))
            }
            PolynomialFamily::Krawtchouk { n, .. } if n < 1 => Err(bad(name, "n", "must be at least 1")),
            PolynomialFamily::Meixner { c, .. } if !(c > 0.0 && c < 1.0) => Err(bad(name, "c", "must lie in (0, 1)")),
            PolynomialFamily::Meixner { beta, .. } if !(beta > 0.0) => Err(bad(name, "beta", "must be positive")),
            PolynomialFamily::Hahn { m, .. } if m < 1 => Err(bad(name, "m", "must be at least 1")),
            PolynomialFamily::Hahn { m, n, draws } if draws < 1 || draws > m + n => {
                Err(bad(name, "draws", "must lie in 1..=m+n"))
            }
            _ => Ok(()),
        }
    }

    /// Highest degree this family can evaluate. Finite discrete supports cap
    /// it at the support size minus one; fitted bases at the fitted degree.
    pub fn max_degree(&self) -> usize {
        match self {
            PolynomialFamily::Krawtchouk { n, .. } => DEFAULT_MAX_DEGREE.min(*n as usize),
            PolynomialFamily::Hahn { draws, .. } => DEFAULT_MAX_DEGREE.min(*draws as usize),
            PolynomialFamily::GramSchmidt(b) => b.max_degree(),
            _ => DEFAULT_MAX_DEGREE,
        }
    }

    pub fn eval(&self, degree: usize, zeta: f64) -> Result<f64, PolyError> {
        let max = self.max_degree();
        if degree > max {
            return Err(PolyError::DegreeOutOfRange {
                family: self.name().to_string(),
                degree,
                max,
            });
        }
        let mut out = vec![0.0; degree + 1];
        self.eval_all(zeta, &mut out);
        Ok(out[degree])
    }

    /// Fills `out[n]` with the degree-`n` polynomial at `zeta` for
    /// `n = 0..out.len()`. The caller keeps `out.len() <= max_degree() + 1`.
    pub fn eval_all(&self, zeta: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        let deg = out.len() - 1;
        let x = zeta;
        match *self {
            PolynomialFamily::Hermite => {
                let mut prev = 0.0;
                for n in 0..deg {
                    let next = x * out[n] - n as f64 * prev;
                    prev = out[n];
                    out[n + 1] = next;
                }
            }
            PolynomialFamily::Laguerre { alpha } => {
                for n in 1..=deg {
                    let mut s = 0.0;
                    let mut xi_over_fact = 1.0;
                    for i in 0..=n {
                        if i > 0 {
                            xi_over_fact *= x / i as f64;
                        }
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign * gen_binom(n as f64 + alpha, n - i) * xi_over_fact;
                    }
                    out[n] = s;
                }
            }
            PolynomialFamily::Jacobi { alpha, beta } => {
                if deg >= 1 {
                    out[1] = 0.5 * ((alpha + beta + 2.0) * x + alpha - beta);
                }
                for n in 1..deg {
                    let nf = n as f64;
                    let g = 2.0 * nf + alpha + beta;
                    let den = 2.0 * (nf + 1.0) * (g - nf + 1.0) * g;
                    let a = (g + 1.0) * (g * (g + 2.0) * x + alpha * alpha - beta * beta);
                    let b = 2.0 * (nf + alpha) * (nf + beta) * (g + 2.0);
                    out[n + 1] = (a * out[n] - b * out[n - 1]) / den;
                }
            }
            PolynomialFamily::Legendre => {
                for n in 1..=deg {
                    let mut s = 0.0;
                    for k in 0..=n / 2 {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign * binom(n, k) * binom(2 * n - 2 * k, n) * x.powi((n - 2 * k) as i32);
                    }
                    out[n] = s / 2f64.powi(n as i32);
                }
            }
            PolynomialFamily::Charlier { a } => {
                for n in 1..=deg {
                    let mut s = 0.0;
                    let mut falling = 1.0;
                    for i in 0..=n {
                        if i > 0 {
                            falling *= x - (i - 1) as f64;
                        }
                        s += binom(n, i) * falling * (-a).powi((n - i) as i32);
                    }
                    out[n] = s;
                }
            }
            PolynomialFamily::Krawtchouk { p, n: big_n } => {
                for n in 1..=deg {
                    let mut s = 0.0;
                    for i in 0..=n {
                        let sign = if (n - i) % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign
                            * gen_binom(big_n as f64 - x, n - i)
                            * gen_binom(x, i)
                            * p.powi((n - i) as i32)
                            * (1.0 - p).powi(i as i32);
                    }
                    out[n] = s;
                }
            }
            PolynomialFamily::Meixner { c, beta } => {
                let mut prev = 0.0;
                for n in 0..deg {
                    let nf = n as f64;
                    let next = (((c - 1.0) * x + nf + c * (nf + beta)) * out[n] - nf * prev) / (c * (nf + beta));
                    prev = out[n];
                    out[n + 1] = next;
                }
            }
            PolynomialFamily::Hahn { m, n: nn, draws } => {
                let alpha = -(m as f64) - 1.0;
                let beta = -(nn as f64) - 1.0;
                let big_n = draws as f64;
                let mut prev = 0.0;
                for n in 0..deg {
                    let nf = n as f64;
                    let ab = alpha + beta;
                    let a_n = (nf + ab + 1.0) * (nf + alpha + 1.0) * (big_n - nf)
                        / ((2.0 * nf + ab + 1.0) * (2.0 * nf + ab + 2.0));
                    let c_n = if n == 0 {
                        0.0
                    } else {
                        nf * (nf + ab + big_n + 1.0) * (nf + beta) / ((2.0 * nf + ab) * (2.0 * nf + ab + 1.0))
                    };
                    let next = ((a_n + c_n - x) * out[n] - c_n * prev) / a_n;
                    prev = out[n];
                    out[n + 1] = next;
                }
            }
            PolynomialFamily::GramSchmidt(ref basis) => basis.eval_all(x, out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(f: &PolynomialFamily, n: usize, x: f64) -> f64 {
        f.eval(n, x).unwrap()
    }

    fn all_askey() -> Vec<PolynomialFamily> {
        vec![
            PolynomialFamily::Hermite,
            PolynomialFamily::Laguerre { alpha: 1.0 },
            PolynomialFamily::Jacobi { alpha: -0.25, beta: -0.25 },
            PolynomialFamily::Legendre,
            PolynomialFamily::Charlier { a: 6.0 },
            PolynomialFamily::Krawtchouk { p: 0.5, n: 10 },
            PolynomialFamily::Meixner { c: 0.2, beta: 10.0 },
            PolynomialFamily::Hahn { m: 100, n: 50, draws: 20 },
        ]
    }

    #[test]
    fn spot_values() {
        assert!((ev(&PolynomialFamily::Legendre, 2, 0.5) + 0.125).abs() < 1e-15);
        assert!((ev(&PolynomialFamily::Hermite, 3, 2.0) - 2.0).abs() < 1e-15);
        assert!(ev(&PolynomialFamily::Charlier { a: 6.0 }, 1, 6.0).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_is_one() {
        for f in all_askey() {
            for x in [-0.7, 0.0, 3.0] {
                assert_eq!(ev(&f, 0, x), 1.0, "{}", f.name());
            }
        }
    }

    #[test]
    fn degree_over_max_is_error() {
        assert!(PolynomialFamily::Legendre.eval(13, 0.1).is_err());
        assert!(PolynomialFamily::Krawtchouk { p: 0.5, n: 10 }.eval(11, 0.1).is_err());
    }

    #[test]
    fn legendre_matches_bonnet_recurrence() {
        for &x in &[-0.9, -0.3, 0.2, 0.77] {
            let (mut p0, mut p1) = (1.0, x);
            for n in 1..12 {
                let p2 = ((2 * n + 1) as f64 * x * p1 - n as f64 * p0) / (n + 1) as f64;
                assert!((ev(&PolynomialFamily::Legendre, n + 1, x) - p2).abs() < 1e-12);
                p0 = p1;
                p1 = p2;
            }
        }
    }

    #[test]
    fn jacobi_with_zero_exponents_is_legendre() {
        let j = PolynomialFamily::Jacobi { alpha: 0.0, beta: 0.0 };
        for n in 0..10 {
            for &x in &[-0.8, 0.1, 0.6] {
                assert!((ev(&j, n, x) - ev(&PolynomialFamily::Legendre, n, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn laguerre_matches_three_term_recurrence() {
        let alpha = 1.0;
        let f = PolynomialFamily::Laguerre { alpha };
        for &x in &[0.3, 2.0, 5.5] {
            let (mut l0, mut l1) = (1.0, 1.0 + alpha - x);
            for n in 1..10 {
                let nf = n as f64;
                let l2 = ((2.0 * nf + 1.0 + alpha - x) * l1 - (nf + alpha) * l0) / (nf + 1.0);
                assert!((ev(&f, n + 1, x) - l2).abs() < 1e-9 * l2.abs().max(1.0));
                l0 = l1;
                l1 = l2;
            }
        }
    }

    // Exact weighted inner products over finite (or truncated) discrete supports.
    fn discrete_gram(f: &PolynomialFamily, pmf: &[(f64, f64)], deg: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut vals = vec![vec![0.0; deg + 1]; pmf.len()];
        for (k, &(x, _)) in pmf.iter().enumerate() {
            f.eval_all(x, &mut vals[k]);
        }
        for i in 0..=deg {
            for j in 0..i {
                let (mut ij, mut ii, mut jj) = (0.0, 0.0, 0.0);
                for (k, &(_, w)) in pmf.iter().enumerate() {
                    ij += w * vals[k][i] * vals[k][j];
                    ii += w * vals[k][i] * vals[k][i];
                    jj += w * vals[k][j] * vals[k][j];
                }
                worst = worst.max(ij.abs() / (ii * jj).sqrt());
            }
        }
        worst
    }

    fn ln_fact(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn charlier_orthogonal_under_poisson() {
        let a: f64 = 6.0;
        let pmf: Vec<_> = (0..150u64)
            .map(|k| (k as f64, (-a + k as f64 * a.ln() - ln_fact(k)).exp()))
            .collect();
        assert!(discrete_gram(&PolynomialFamily::Charlier { a }, &pmf, 8) < 1e-10);
    }

    #[test]
    fn krawtchouk_orthogonal_under_binomial() {
        let (p, n) = (0.5f64, 10u64);
        let pmf: Vec<_> = (0..=n)
            .map(|k| (k as f64, binom(n as usize, k as usize) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)))
            .collect();
        assert!(discrete_gram(&PolynomialFamily::Krawtchouk { p, n }, &pmf, 8) < 1e-10);
    }

    #[test]
    fn meixner_orthogonal_under_negative_binomial() {
        let (c, beta): (f64, f64) = (0.2, 10.0);
        let pmf: Vec<_> = (0..300u64)
            .map(|k| {
                let kf = k as f64;
                (kf, (gen_binom(kf + beta - 1.0, k as usize).ln() + kf * c.ln() + beta * (1.0 - c).ln()).exp())
            })
            .collect();
        assert!(discrete_gram(&PolynomialFamily::Meixner { c, beta }, &pmf, 8) < 1e-10);
    }

    #[test]
    fn hahn_orthogonal_under_hypergeometric() {
        let (m, n, draws) = (100usize, 50usize, 20usize);
        let pmf: Vec<_> = (0..=draws)
            .map(|k| (k as f64, binom(m, k) * binom(n, draws - k) / binom(m + n, draws)))
            .collect();
        let f = PolynomialFamily::Hahn { m: 100, n: 50, draws: 20 };
        assert!(discrete_gram(&f, &pmf, 8) < 1e-9);
    }

    #[test]
    fn matched_distributions_cover_askey() {
        let specs = [
            FamilySpec::Hermite,
            FamilySpec::Laguerre { alpha: 1.0 },
            FamilySpec::Jacobi { alpha: -0.25, beta: -0.25 },
            FamilySpec::Legendre,
            FamilySpec::Charlier { a: 6.0 },
            FamilySpec::Krawtchouk { p: 0.5, n: 10 },
            FamilySpec::Meixner { c: 0.2, beta: 10.0 },
            FamilySpec::Hahn { m: 100, n: 50, draws: 20 },
        ];
        for s in specs {
            assert!(s.matched_distribution().unwrap().validate().is_ok());
            assert!(s.build(&[]).is_ok());
        }
        assert!(FamilySpec::GramSchmidt { max_degree: 2 }.matched_distribution().is_none());
    }
}
