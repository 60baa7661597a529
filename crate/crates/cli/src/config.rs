use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use tipc::capacity::ThresholdConfig;
use tipc::distributions::{DistributionSpec, InputShaping};
use tipc::narma_analysis::{InputMode, LyapunovConfig};
use tipc::polychaos::{FamilySpec, SweepSpec};
use tipc::systems::{Activation, EsnConfig, LimitCycleConfig};

use crate::error::CliError;

/// One capacity experiment: a state source, its input, the target sweep
/// and the significance threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub input: InputConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub threshold: ThresholdConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// Scalar tanh node. `standardize` rescales the input to zero mean and
    /// the given standard deviation using the sample moments; otherwise
    /// `shaping` applies (identity by default).
    Esn1d {
        rho: f64,
        #[serde(default)]
        shaping: Option<InputShaping>,
        #[serde(default)]
        standardize: Option<f64>,
    },
    Esn(EsnConfig),
    Narma10(NarmaSystem),
    LimitCycle(LimitCycleConfig),
    /// State read from disk. Rows are steps `washout, washout + 1, ...`.
    /// Without `input` the driving series is regenerated from the input block.
    Csv {
        state: PathBuf,
        #[serde(default)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NarmaSystem {
    pub sigma: f64,
    pub mode: InputMode,
    /// Initial history `y_0 .. y_9`; zeros when absent.
    #[serde(default)]
    pub init: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub distribution: DistributionSpec,
    /// Rows kept for analysis.
    pub length: usize,
    #[serde(default = "washout")]
    pub washout: usize,
    pub seed: u64,
}

fn washout() -> usize {
    tipc::systems::DEFAULT_WASHOUT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: FamilySpec,
    pub max_degree: usize,
    pub max_delay: usize,
    #[serde(default)]
    pub delay_per_degree: Vec<usize>,
    #[serde(default)]
    pub max_factor_degree: Option<usize>,
    /// Temporal harmonics, only for `tipc`.
    #[serde(default)]
    pub harmonics: Vec<usize>,
    #[serde(default = "yes")]
    pub include_static: bool,
    /// Fourier components removed per column before `tipc` analysis.
    #[serde(default)]
    pub detrend_harmonics: Option<usize>,
    #[serde(default)]
    pub rank_tol: Option<f64>,
}

fn yes() -> bool {
    true
}

impl SweepConfig {
    pub fn sweep_spec(&self, family_max: usize) -> SweepSpec {
        let mut s = SweepSpec::new(self.max_degree, self.max_delay);
        s.delay_per_degree = self.delay_per_degree.clone();
        s.max_factor_degree = Some(self.max_factor_degree.unwrap_or(family_max).min(family_max));
        s.harmonics = self.harmonics.clone();
        s.include_static = self.include_static;
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "dot")]
    pub dir: PathBuf,
    /// File name prefix.
    #[serde(default = "stem")]
    pub stem: String,
    #[serde(default = "formats")]
    pub formats: Vec<Format>,
}

fn dot() -> PathBuf {
    PathBuf::from(".")
}
fn stem() -> String {
    "report".into()
}
fn formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: dot(),
            stem: stem(),
            formats: formats(),
        }
    }
}

impl OutputConfig {
    pub fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let name = if suffix.is_empty() {
            format!("{}.{ext}", self.stem)
        } else {
            format!("{}_{suffix}.{ext}", self.stem)
        };
        self.dir.join(name)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// NARMA10 analyses; every block present is run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NarmaSuiteConfig {
    #[serde(default)]
    pub divergence: Option<DivergenceTask>,
    #[serde(default)]
    pub basin_reduced: Option<BasinReducedTask>,
    #[serde(default)]
    pub basin_psi_sigma: Option<BasinPsiSigmaTask>,
    #[serde(default)]
    pub lyapunov: Option<LyapunovTask>,
    #[serde(default)]
    pub approx_model: Option<ApproxModelTask>,
    #[serde(default)]
    pub readout: Option<ReadoutTask>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceTask {
    pub sigmas: Grid,
    pub mode: InputMode,
    pub n_seeds: usize,
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinReducedTask {
    pub w1: Grid,
    pub w2: Grid,
    pub sigma: f64,
    pub mode: InputMode,
    pub max_steps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinPsiSigmaTask {
    pub psi: Grid,
    pub sigma: Grid,
    pub mode: InputMode,
    pub max_steps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovTask {
    pub sigmas: Grid,
    pub mode: InputMode,
    pub seed: u64,
    #[serde(default)]
    pub settings: LyapunovConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxModelTask {
    pub sigma: f64,
    pub mode: InputMode,
    pub linear_delays: Vec<usize>,
    pub cross_delays: Vec<usize>,
    pub length: usize,
    #[serde(default = "washout")]
    pub washout: usize,
    pub seed: u64,
    /// Measure the approximate model's own IPC for comparison.
    #[serde(default = "yes")]
    pub measure_ipc: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutTask {
    pub sigma: f64,
    pub mode: InputMode,
    pub rhos: Grid,
    pub activations: Vec<Activation>,
    pub weight_seeds: Vec<u64>,
    pub length: usize,
    #[serde(default = "washout")]
    pub washout: usize,
    pub seed: u64,
    #[serde(default = "half")]
    pub train_fraction: f64,
    #[serde(default = "tenth")]
    pub input_intensity: f64,
    /// First-order delays and cross pairs `(s, s + 9)` measured on the
    /// trained tanh outputs; 0 skips the IPC pass.
    #[serde(default)]
    pub ipc_max_delay: usize,
}

fn half() -> f64 {
    0.5
}
fn tenth() -> f64 {
    0.1
}

/// Either explicit values or `n` evenly spaced points from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, n: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { n: 0, .. } => Vec::new(),
            Grid::Range { start, n: 1, .. } => vec![start],
            Grid::Range { start, stop, n } => {
                let h = (stop - start) / (n - 1) as f64;
                (0..n).map(|i| start + h * i as f64).collect()
            }
        }
    }
}

pub fn parse_experiment(text: &str, origin: &str) -> Result<ExperimentConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::config(format!("{origin}: {}", e.to_string().trim_end())))
}

pub fn parse_suite(text: &str, origin: &str) -> Result<NarmaSuiteConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::config(format!("{origin}: {}", e.to_string().trim_end())))
}

impl ExperimentConfig {
    /// Resolves relative file paths against `base` (the config's directory).
    pub fn rebase(&mut self, base: &Path) {
        if let SystemConfig::Csv { state, input } = &mut self.system {
            *state = base.join(&*state);
            if let Some(p) = input {
                *p = base.join(&*p);
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let SystemConfig::Csv { state, input } = &self.system {
            for (field, p) in [("system.state", Some(state)), ("system.input", input.as_ref())] {
                if let Some(p) = p {
                    if !p.is_file() {
                        return Err(CliError::config(format!("{field}: file {} does not exist", p.display())));
                    }
                }
            }
        }
        if !matches!(self.system, SystemConfig::Csv { .. }) && self.input.length < 2 {
            return Err(CliError::config("input.length: needs at least 2 rows"));
        }
        if self.sweep.max_degree == 0 {
            return Err(CliError::config("sweep.max_degree: must be at least 1"));
        }
        if !self.sweep.include_static && self.sweep.harmonics.is_empty() {
            return Err(CliError::config("sweep.include_static: false leaves no targets without harmonics"));
        }
        if self.output.formats.is_empty() {
            return Err(CliError::config("output.formats: at least one format is needed"));
        }
        self.input.distribution.validate()?;
        Ok(())
    }
}

impl NarmaSuiteConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let any = self.divergence.is_some()
            || self.basin_reduced.is_some()
            || self.basin_psi_sigma.is_some()
            || self.lyapunov.is_some()
            || self.approx_model.is_some()
            || self.readout.is_some();
        if !any {
            return Err(CliError::config("narma suite: no task block given"));
        }
        if self.output.formats.is_empty() {
            return Err(CliError::config("output.formats: at least one format is needed"));
        }
        if let Some(r) = &self.readout {
            if r.activations.is_empty() || r.weight_seeds.is_empty() {
                return Err(CliError::config("readout: activations and weight_seeds must be non-empty"));
            }
        }
        Ok(())
    }
}
