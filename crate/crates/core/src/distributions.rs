//! Seedable input laws and affine input shaping.
//!
//! Every law is parameterized with the symbols of the orthogonal family it
//! pairs with, so a `Gamma { alpha }` stream is orthogonal under
//! `Laguerre { alpha }`, a `Beta { alpha, beta }` stream under
//! `Jacobi { alpha, beta }`, and so on.
//!
//! Generation algorithms (all driven by a `ChaCha8Rng` seeded from the
//! stream seed):
//!
//! | kind               | algorithm                                                   |
//! |--------------------|-------------------------------------------------------------|
//! | gaussian           | ziggurat (`rand_distr::Normal`)                             |
//! | gamma              | Marsaglia–Tsang, shape `alpha + 1`, unit scale              |
//! | beta               | ratio of gammas on `[0, 1]`, mapped to `[-1, 1]`            |
//! | uniform            | 53-bit float in `[low, high)`                               |
//! | poisson            | Knuth / PTRS rejection (`rand_distr::Poisson`)              |
//! | binomial           | BTPE (`rand_distr::Binomial`)                               |
//! | negative_binomial  | gamma–Poisson mixture (failures before `beta` successes)    |
//! | hypergeometric     | H2PE / inversion (`rand_distr::Hypergeometric`)             |
//! | mixed_gaussian     | categorical component pick, then ziggurat                   |
//! | pareto             | inversion                                                   |
//! | zipf               | rejection-inversion on `{1..support}`                       |
//! | bernoulli          | threshold on a 64-bit draw                                  |

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Beta, Binomial, Gamma, Hypergeometric, Normal, Pareto, Poisson, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("invalid parameter `{field}` for {kind}: {reason}")]
    InvalidParameter {
        kind: &'static str,
        field: &'static str,
        reason: String,
    },
    #[error("sample count must be at least 1")]
    EmptyStream,
}

/// One component of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

fn default_mixture() -> Vec<MixtureComponent> {
    vec![
        MixtureComponent { weight: 0.5, mean: -2.0, std: 1.0 },
        MixtureComponent { weight: 0.5, mean: 2.0, std: 1.0 },
    ]
}

fn default_std() -> f64 {
    1.0
}
fn default_low() -> f64 {
    -1.0
}
fn default_high() -> f64 {
    1.0
}
fn default_half() -> f64 {
    0.5
}
fn default_pareto_shape() -> f64 {
    5.0
}
fn default_zipf_support() -> u64 {
    50
}
fn default_zipf_exponent() -> f64 {
    1.0
}

/// Law of the i.i.d. driving variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Gaussian {
        #[serde(default)]
        mean: f64,
        #[serde(default = "default_std")]
        std: f64,
    },
    /// Density proportional to `x^alpha e^{-x}` on `[0, inf)`.
    Gamma {
        #[serde(default = "default_std")]
        alpha: f64,
    },
    /// Density proportional to `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
    Beta {
        #[serde(default = "default_jacobi")]
        alpha: f64,
        #[serde(default = "default_jacobi")]
        beta: f64,
    },
    Uniform {
        #[serde(default = "default_low")]
        low: f64,
        #[serde(default = "default_high")]
        high: f64,
    },
    Poisson {
        #[serde(default = "default_charlier")]
        a: f64,
    },
    Binomial {
        #[serde(default = "default_half")]
        p: f64,
        #[serde(default = "default_binomial_n")]
        n: u64,
    },
    /// Failures before the `beta`-th success, failure probability `c`.
    NegativeBinomial {
        #[serde(default = "default_meixner_c")]
        c: f64,
        #[serde(default = "default_meixner_beta")]
        beta: f64,
    },
    /// Successes in `draws` draws from `m` successes and `n` failures.
    Hypergeometric {
        #[serde(default = "default_hahn_m")]
        m: u64,
        #[serde(default = "default_hahn_n")]
        n: u64,
        #[serde(default = "default_hahn_draws")]
        draws: u64,
    },
    MixedGaussian {
        #[serde(default = "default_mixture")]
        components: Vec<MixtureComponent>,
    },
    Pareto {
        #[serde(default = "default_std")]
        scale: f64,
        #[serde(default = "default_pareto_shape")]
        shape: f64,
    },
    /// Truncated power law on `{1, ..., support}`.
    Zipf {
        #[serde(default = "default_zipf_exponent")]
        exponent: f64,
        #[serde(default = "default_zipf_support")]
        support: u64,
    },
    Bernoulli {
        #[serde(default = "default_half")]
        p: f64,
    },
}

fn default_jacobi() -> f64 {
    -0.25
}
fn default_charlier() -> f64 {
    6.0
}
fn default_binomial_n() -> u64 {
    10
}
fn default_meixner_c() -> f64 {
    0.2
}
fn default_meixner_beta() -> f64 {
    10.0
}
fn default_hahn_m() -> u64 {
    100
}
fn default_hahn_n() -> u64 {
    50
}
fn default_hahn_draws() -> u64 {
    20
}

/// Where samples of a law live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// Closed interval; infinite endpoints allowed.
    Interval { low: f64, high: f64 },
    /// Integers in `low..=high`; `high` may be `u64::MAX` for unbounded.
    Integers { low: u64, high: u64 },
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Support::Interval { low, high } => x >= low && x <= high,
            Support::Integers { low, high } => {
                x.fract() == 0.0 && x >= low as f64 && (high == u64::MAX || x <= high as f64)
            }
        }
    }
}

fn invalid(kind: &'static str, field: &'static str, reason: impl Into<String>) -> DistributionError {
    DistributionError::InvalidParameter {
        kind,
        field,
        reason: reason.into(),
    }
}

fn finite(kind: &'static str, field: &'static str, v: f64) -> Result<(), DistributionError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(kind, field, "must be finite"))
    }
}

impl DistributionSpec {
    pub fn uniform() -> Self {
        DistributionSpec::Uniform { low: -1.0, high: 1.0 }
    }

    pub fn standard_gaussian() -> Self {
        DistributionSpec::Gaussian { mean: 0.0, std: 1.0 }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DistributionSpec::Gaussian { .. } => "gaussian",
            DistributionSpec::Gamma { .. } => "gamma",
            DistributionSpec::Beta { .. } => "beta",
            DistributionSpec::Uniform { .. } => "uniform",
            DistributionSpec::Poisson { .. } => "poisson",
            DistributionSpec::Binomial { .. } => "binomial",
            DistributionSpec::NegativeBinomial { .. } => "negative_binomial",
            DistributionSpec::Hypergeometric { .. } => "hypergeometric",
            DistributionSpec::MixedGaussian { .. } => "mixed_gaussian",
            DistributionSpec::Pareto { .. } => "pareto",
            DistributionSpec::Zipf { .. } => "zipf",
            DistributionSpec::Bernoulli { .. } => "bernoulli",
        }
    }

    pub fn validate(&self) -> Result<(), DistributionError> {
        let kind = self.kind_name();
        match *self {
            DistributionSpec::Gaussian { mean, std } => {
                finite(kind, "mean", mean)?;
                if !(std > 0.0 && std.is_finite()) {
                    return Err(invalid(kind, "std", "must be positive"));
                }
            }
            DistributionSpec::Gamma { alpha } => {
                if !(alpha > -1.0 && alpha.is_finite()) {
                    return Err(invalid(kind, "alpha", "must exceed -1"));
                }
            }
            DistributionSpec::Beta { alpha, beta } => {
                if !(alpha > -1.0 && alpha.is_finite()) {
                    return Err(invalid(kind, "alpha", "must exceed -1"));
                }
                if !(beta > -1.0 && beta.is_finite()) {
                    return Err(invalid(kind, "beta", "must exceed -1"));
                }
            }
            DistributionSpec::Uniform { low, high } => {
                finite(kind, "low", low)?;
                finite(kind, "high", high)?;
                if high <= low {
                    return Err(invalid(kind, "high", "must exceed low"));
                }
            }
            DistributionSpec::Poisson { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(invalid(kind, "a", "must be positive"));
                }
            }
            DistributionSpec::Binomial { p, n } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(kind, "p", "must lie in [0, 1]"));
                }
                if n < 1 {
                    return Err(invalid(kind, "n", "must be at least 1"));
                }
            }
            DistributionSpec::NegativeBinomial { c, beta } => {
                if !(c > 0.0 && c < 1.0) {
                    return Err(invalid(kind, "c", "must lie in (0, 1)"));
                }
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(invalid(kind, "beta", "must be positive"));
                }
            }
            DistributionSpec::Hypergeometric { m, n, draws } => {
                if m == 0 {
                    return Err(invalid(kind, "m", "must be at least 1"));
                }
                if draws == 0 || draws > m + n {
                    return Err(invalid(kind, "draws", "must lie in 1..=m+n"));
                }
            }
            DistributionSpec::MixedGaussian { ref components } => {
                if components.is_empty() {
                    return Err(invalid(kind, "components", "at least one component required"));
                }
                let mut total = 0.0;
                for c in components {
                    if !(c.weight >= 0.0 && c.weight.is_finite()) {
                        return Err(invalid(kind, "weight", "must be non-negative"));
                    }
                    finite(kind, "mean", c.mean)?;
                    if !(c.std > 0.0 && c.std.is_finite()) {
                        return Err(invalid(kind, "std", "must be positive"));
                    }
                    total += c.weight;
                }
                if total <= 0.0 {
                    return Err(invalid(kind, "weight", "weights sum to zero"));
                }
            }
            DistributionSpec::Pareto { scale, shape } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(invalid(kind, "scale", "must be positive"));
                }
                if !(shape > 0.0 && shape.is_finite()) {
                    return Err(invalid(kind, "shape", "must be positive"));
                }
            }
            DistributionSpec::Zipf { exponent, support } => {
                if !(exponent >= 0.0 && exponent.is_finite()) {
                    return Err(invalid(kind, "exponent", "must be non-negative"));
                }
                if support < 1 {
                    return Err(invalid(kind, "support", "must be at least 1"));
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(kind, "p", "must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }

    pub fn support(&self) -> Support {
        match *self {
            DistributionSpec::Gaussian { .. } | DistributionSpec::MixedGaussian { .. } => {
                Support::Interval { low: f64::NEG_INFINITY, high: f64::INFINITY }
            }
            DistributionSpec::Gamma { .. } => Support::Interval { low: 0.0, high: f64::INFINITY },
            DistributionSpec::Beta { .. } => Support::Interval { low: -1.0, high: 1.0 },
            DistributionSpec::Uniform { low, high } => Support::Interval { low, high },
            DistributionSpec::Poisson { .. } | DistributionSpec::NegativeBinomial { .. } => {
                Support::Integers { low: 0, high: u64::MAX }
            }
            DistributionSpec::Binomial { n, .. } => Support::Integers { low: 0, high: n },
            DistributionSpec::Hypergeometric { m, n, draws } => Support::Integers {
                low: draws.saturating_sub(n),
                high: draws.min(m),
            },
            DistributionSpec::Pareto { scale, .. } => Support::Interval { low: scale, high: f64::INFINITY },
            DistributionSpec::Zipf { support, .. } => Support::Integers { low: 1, high: support },
            DistributionSpec::Bernoulli { .. } => Support::Integers { low: 0, high: 1 },
        }
    }

    /// Analytic mean, `None` where it does not exist.
    pub fn mean(&self) -> Option<f64> {
        Some(match *self {
            DistributionSpec::Gaussian { mean, .. } => mean,
            DistributionSpec::Gamma { alpha } => alpha + 1.0,
            DistributionSpec::Beta { alpha, beta } => (beta - alpha) / (alpha + beta + 2.0),
            DistributionSpec::Uniform { low, high } => 0.5 * (low + high),
            DistributionSpec::Poisson { a } => a,
            DistributionSpec::Binomial { p, n } => n as f64 * p,
            DistributionSpec::NegativeBinomial { c, beta } => beta * c / (1.0 - c),
            DistributionSpec::Hypergeometric { m, n, draws } => draws as f64 * m as f64 / (m + n) as f64,
            DistributionSpec::MixedGaussian { ref components } => {
                let w: f64 = components.iter().map(|c| c.weight).sum();
                components.iter().map(|c| c.weight * c.mean).sum::<f64>() / w
            }
            DistributionSpec::Pareto { scale, shape } => {
                if shape <= 1.0 {
                    return None;
                }
                shape * scale / (shape - 1.0)
            }
            DistributionSpec::Zipf { exponent, support } => {
                let (m1, _) = zipf_moments(exponent, support);
                m1
            }
            DistributionSpec::Bernoulli { p } => p,
        })
    }

    /// Analytic variance, `None` where it does not exist.
    pub fn variance(&self) -> Option<f64> {
        Some(match *self {
            DistributionSpec::Gaussian { std, .. } => std * std,
            DistributionSpec::Gamma { alpha } => alpha + 1.0,
            DistributionSpec::Beta { alpha, beta } => {
                let (a, b) = (beta + 1.0, alpha + 1.0);
                4.0 * a * b / ((a + b) * (a + b) * (a + b + 1.0))
            }
            DistributionSpec::Uniform { low, high } => (high - low) * (high - low) / 12.0,
            DistributionSpec::Poisson { a } => a,
            DistributionSpec::Binomial { p, n } => n as f64 * p * (1.0 - p),
            DistributionSpec::NegativeBinomial { c, beta } => beta * c / ((1.0 - c) * (1.0 - c)),
            DistributionSpec::Hypergeometric { m, n, draws } => {
                let total = (m + n) as f64;
                let k = draws as f64;
                if total <= 1.0 {
                    return Some(0.0);
                }
                k * (m as f64 / total) * (n as f64 / total) * (total - k) / (total - 1.0)
            }
            DistributionSpec::MixedGaussian { ref components } => {
                let w: f64 = components.iter().map(|c| c.weight).sum();
                let mean = self.mean()?;
                components
                    .iter()
                    .map(|c| c.weight / w * (c.std * c.std + c.mean * c.mean))
                    .sum::<f64>()
                    - mean * mean
            }
            DistributionSpec::Pareto { scale, shape } => {
                if shape <= 2.0 {
                    return None;
                }
                scale * scale * shape / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0))
            }
            DistributionSpec::Zipf { exponent, support } => {
                let (m1, m2) = zipf_moments(exponent, support);
                m2 - m1 * m1
            }
            DistributionSpec::Bernoulli { p } => p * (1.0 - p),
        })
    }

    /// Builds an owned, seeded stream.
    pub fn sampler(&self, seed: u64) -> Result<Sampler, DistributionError> {
        self.validate()?;
        let kind = self.kind_name();
        let law = match *self {
            DistributionSpec::Gaussian { mean, std } => {
                Law::Normal(Normal::new(mean, std).map_err(|e| invalid(kind, "std", e.to_string()))?)
            }
            DistributionSpec::Gamma { alpha } => {
                Law::Gamma(Gamma::new(alpha + 1.0, 1.0).map_err(|e| invalid(kind, "alpha", e.to_string()))?)
            }
            DistributionSpec::Beta { alpha, beta } => Law::Beta(
                Beta::new(beta + 1.0, alpha + 1.0).map_err(|e| invalid(kind, "alpha", e.to_string()))?,
            ),
            DistributionSpec::Uniform { low, high } => Law::Uniform { low, width: high - low },
            DistributionSpec::Poisson { a } => {
                Law::Poisson(Poisson::new(a).map_err(|e| invalid(kind, "a", e.to_string()))?)
            }
            DistributionSpec::Binomial { p, n } => {
                Law::Binomial(Binomial::new(n, p).map_err(|e| invalid(kind, "p", e.to_string()))?)
            }
            DistributionSpec::NegativeBinomial { c, beta } => Law::NegativeBinomial(
                Gamma::new(beta, c / (1.0 - c)).map_err(|e| invalid(kind, "beta", e.to_string()))?,
            ),
            DistributionSpec::Hypergeometric { m, n, draws } => Law::Hypergeometric(
                Hypergeometric::new(m + n, m, draws).map_err(|e| invalid(kind, "draws", e.to_string()))?,
            ),
            DistributionSpec::MixedGaussian { ref components } => {
                let pick = WeightedIndex::new(components.iter().map(|c| c.weight))
                    .map_err(|e| invalid(kind, "weight", e.to_string()))?;
                let normals = components
                    .iter()
                    .map(|c| Normal::new(c.mean, c.std).map_err(|e| invalid(kind, "std", e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                Law::Mixture { pick, normals }
            }
            DistributionSpec::Pareto { scale, shape } => {
                Law::Pareto(Pareto::new(scale, shape).map_err(|e| invalid(kind, "shape", e.to_string()))?)
            }
            DistributionSpec::Zipf { exponent, support } => Law::Zipf(
                Zipf::new(support as f64, exponent).map_err(|e| invalid(kind, "exponent", e.to_string()))?,
            ),
            DistributionSpec::Bernoulli { p } => {
                Law::Bernoulli(Bernoulli::new(p).map_err(|e| invalid(kind, "p", e.to_string()))?)
            }
        };
        Ok(Sampler {
            law,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

fn zipf_moments(exponent: f64, support: u64) -> (f64, f64) {
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for k in 1..=support {
        let x = k as f64;
        let w = x.powf(-exponent);
        z += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    (m1 / z, m2 / z)
}

#[derive(Debug, Clone)]
enum Law {
    Normal(Normal<f64>),
    Gamma(Gamma<f64>),
    Beta(Beta<f64>),
    Uniform { low: f64, width: f64 },
    Poisson(Poisson<f64>),
    Binomial(Binomial),
    NegativeBinomial(Gamma<f64>),
    Hypergeometric(Hypergeometric),
    Mixture { pick: WeightedIndex<f64>, normals: Vec<Normal<f64>> },
    Pareto(Pareto<f64>),
    Zipf(Zipf<f64>),
    Bernoulli(Bernoulli),
}

/// A single-owner seeded stream of i.i.d. draws.
#[derive(Debug, Clone)]
pub struct Sampler {
    law: Law,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn next_value(&mut self) -> f64 {
        let rng = &mut self.rng;
        match &self.law {
            Law::Normal(d) => d.sample(rng),
            Law::Gamma(d) => d.sample(rng),
            Law::Beta(d) => 2.0 * d.sample(rng) - 1.0,
            Law::Uniform { low, width } => low + width * rng.random::<f64>(),
            Law::Poisson(d) => d.sample(rng),
            Law::Binomial(d) => d.sample(rng) as f64,
            Law::NegativeBinomial(mix) => {
                let lambda = mix.sample(rng);
                if lambda > 0.0 {
                    match Poisson::new(lambda) {
                        Ok(p) => p.sample(rng),
                        Err(_) => 0.0,
                    }
                } else {
                    0.0
                }
            }
            Law::Hypergeometric(d) => d.sample(rng) as f64,
            Law::Mixture { pick, normals } => {
                let i = pick.sample(rng);
                normals[i].sample(rng)
            }
            Law::Pareto(d) => d.sample(rng),
            Law::Zipf(d) => d.sample(rng),
            Law::Bernoulli(d) => {
                if d.sample(rng) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl Iterator for Sampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_value())
    }
}

/// Draws `count` i.i.d. values; identical `(spec, count, seed)` give identical output.
pub fn sample_stream(spec: &DistributionSpec, count: usize, seed: u64) -> Result<Vec<f64>, DistributionError> {
    if count == 0 {
        return Err(DistributionError::EmptyStream);
    }
    Ok(spec.sampler(seed)?.take(count).collect())
}

/// Affine map `u = mean + scale * zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputShaping {
    pub mean: f64,
    pub scale: f64,
}

impl Default for InputShaping {
    fn default() -> Self {
        InputShaping { mean: 0.0, scale: 1.0 }
    }
}

impl InputShaping {
    pub fn new(mean: f64, scale: f64) -> Self {
        InputShaping { mean, scale }
    }

    /// `u` uniform on `[-sigma, sigma]` for `zeta` uniform on `[-1, 1]`.
    pub fn symmetric(sigma: f64) -> Self {
        InputShaping { mean: 0.0, scale: sigma }
    }

    /// `u` uniform on `[0, sigma]` for `zeta` uniform on `[-1, 1]`.
    pub fn asymmetric(sigma: f64) -> Self {
        InputShaping {
            mean: 0.5 * sigma,
            scale: 0.5 * sigma,
        }
    }

    /// Zero-mean shaping with standard deviation `target_std` for a law with
    /// the given moments.
    pub fn standardizing(law_mean: f64, law_variance: f64, target_std: f64) -> Self {
        let scale = target_std / law_variance.sqrt();
        InputShaping {
            mean: -scale * law_mean,
            scale,
        }
    }

    #[inline]
    pub fn apply(&self, zeta: f64) -> f64 {
        self.mean + self.scale * zeta
    }
}

pub fn shape_input(zeta: &[f64], shaping: &InputShaping) -> Vec<f64> {
    zeta.iter().map(|&z| shaping.apply(z)).collect()
}
