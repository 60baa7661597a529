use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use tipc::capacity::{analyze, AnalysisOptions, CapacityReport, StateMatrix};
use tipc::distributions::{sample_stream, DistributionSpec, InputShaping};
use tipc::narma_analysis::{
    approx_model_coeffs, basin_scan_psi_sigma, basin_scan_reduced, divergence_probability, lyapunov_spectrum,
    simulate_approx_model, BasinGrid, InputMode, SurvivalPoint,
};
use tipc::numeric::{mean, variance};
use tipc::polychaos::{FamilySpec, PolynomialFamily, SweepSpec};
use tipc::systems::{
    nrmse, simulate_1d_esn, simulate_esn, simulate_limit_cycle, simulate_narma10, train_readout, Activation, EsnConfig,
    Narma10Config, ReadoutSplit,
};

use crate::config::{ExperimentConfig, Format, NarmaSuiteConfig, OutputConfig, SystemConfig};
use crate::error::CliError;
use crate::output::{extended_f64, write_csv, write_json, write_report_csv};

/// A state with the input series that drove it.
pub struct Prepared {
    pub state: StateMatrix,
    pub zeta: Vec<f64>,
}

fn system_name(s: &SystemConfig) -> &'static str {
    match s {
        SystemConfig::Esn1d { .. } => "esn1d",
        SystemConfig::Esn(_) => "esn",
        SystemConfig::Narma10(_) => "narma10",
        SystemConfig::LimitCycle(_) => "limit_cycle",
        SystemConfig::Csv { .. } => "csv",
    }
}

fn sample(dist: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<f64>, CliError> {
    Ok(sample_stream(dist, n, seed)?)
}

fn read_matrix(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let fail = |e: csv::Error| CliError::data(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(fail)?;
    let header: Vec<String> = r.headers().map_err(fail)?.iter().map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(fail)?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v.trim().parse::<f64>().map_err(|_| {
                    CliError::data(format!("{}: row {}, column {}: `{v}` is not a number", path.display(), i + 1, j + 1))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Reads a state CSV: a header row, then one row per step.
pub fn read_state_csv(path: &Path, washout: usize) -> Result<StateMatrix, CliError> {
    let (header, rows) = read_matrix(path)?;
    let (t, n) = (rows.len(), header.len());
    if t <= n {
        return Err(CliError::data(format!(
            "{}: state has {t} rows and {n} columns; capacity needs more rows than columns",
            path.display()
        )));
    }
    let mut s = StateMatrix::from_rows(&rows, washout)?;
    s.labels = Some(header);
    s.metadata.insert("source".into(), path.display().to_string());
    Ok(s)
}

pub fn read_input_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let (header, rows) = read_matrix(path)?;
    if header.len() != 1 {
        return Err(CliError::data(format!(
            "{}: input needs exactly one column, found {}",
            path.display(),
            header.len()
        )));
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

/// Simulates (or loads) the state the configuration describes.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, CliError> {
    let inp = &cfg.input;
    let total = inp.washout + inp.length;
    let (state, zeta) = match &cfg.system {
        SystemConfig::Csv { state, input } => {
            let s = read_state_csv(state, inp.washout)?;
            let zeta = match input {
                Some(p) => read_input_csv(p)?,
                None => sample(&inp.distribution, inp.washout + s.rows(), inp.seed)?,
            };
            if zeta.len() < inp.washout + s.rows() {
                return Err(CliError::data(format!(
                    "input has {} samples; washout {} plus {} state rows need at least {}",
                    zeta.len(),
                    inp.washout,
                    s.rows(),
                    inp.washout + s.rows()
                )));
            }
            (s, zeta)
        }
        sys => {
            let zeta = sample(&inp.distribution, total, inp.seed)?;
            let state = match sys {
                SystemConfig::Esn1d { rho, shaping, standardize } => {
                    let sh = match (standardize, shaping) {
                        (Some(_), Some(_)) => {
                            return Err(CliError::config("system: give either `shaping` or `standardize`, not both"))
                        }
                        (Some(sd), None) => InputShaping::standardizing(mean(&zeta), variance(&zeta), *sd),
                        (None, Some(s)) => *s,
                        (None, None) => InputShaping::default(),
                    };
                    simulate_1d_esn(*rho, &sh, &zeta, inp.washout)?
                }
                SystemConfig::Esn(e) => simulate_esn(e, &zeta, inp.washout)?,
                SystemConfig::Narma10(n) => {
                    let mut c = Narma10Config::new(n.mode.shaping(n.sigma));
                    if let Some(init) = &n.init {
                        c.init = init.clone();
                    }
                    // x_{t+1} needs zeta_t, so the last sample only pads the window.
                    simulate_narma10(&c, &zeta[..total - 1])?.state(inp.washout)?
                }
                SystemConfig::LimitCycle(l) => simulate_limit_cycle(l, &zeta, inp.washout)?.state,
                SystemConfig::Csv { .. } => unreachable!(),
            };
            (state, zeta)
        }
    };
    Ok(Prepared { state, zeta })
}

fn family(spec: &FamilySpec, zeta: &[f64]) -> Result<PolynomialFamily, CliError> {
    Ok(spec.build(zeta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Targets {
    Static,
    Temporal,
}

/// Result of a capacity run: the report and the files written.
#[derive(Debug, Clone)]
pub struct CapacityRun {
    pub report: CapacityReport,
    pub files: Vec<PathBuf>,
}

fn run_capacity(cfg: &ExperimentConfig, targets: Targets) -> Result<CapacityRun, CliError> {
    cfg.validate()?;
    let sw = &cfg.sweep;
    let detrend = match targets {
        Targets::Static => {
            if !sw.harmonics.is_empty() {
                return Err(CliError::config("sweep.harmonics: temporal targets need the `tipc` subcommand"));
            }
            if sw.detrend_harmonics.is_some() {
                return Err(CliError::config("sweep.detrend_harmonics: detrending needs the `tipc` subcommand"));
            }
            None
        }
        Targets::Temporal => {
            if sw.harmonics.is_empty() {
                return Err(CliError::config("sweep.harmonics: `tipc` needs at least one temporal harmonic"));
            }
            Some(sw.detrend_harmonics.unwrap_or(1))
        }
    };
    let prep = prepare(cfg)?;
    let fam = family(&sw.family, &prep.zeta)?;
    let specs = sw.sweep_spec(fam.max_degree()).enumerate();
    let opts = AnalysisOptions {
        detrend_harmonics: detrend,
        rank_tol: sw.rank_tol,
        threshold: cfg.threshold.clone(),
    };
    let mut report = analyze(&prep.state, &prep.zeta, &fam, &specs, &opts)?;
    report.metadata.insert("system".into(), system_name(&cfg.system).into());
    report.metadata.insert("input.seed".into(), cfg.input.seed.to_string());
    report.metadata.insert("input.distribution".into(), cfg.input.distribution.kind_name().into());
    let files = write_capacity(&cfg.output, &report)?;
    Ok(CapacityRun { report, files })
}

fn write_capacity(out: &OutputConfig, rep: &CapacityReport) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    if out.wants(Format::Csv) {
        let p = out.path("", "csv");
        write_report_csv(&p, rep)?;
        files.push(p);
    }
    if out.wants(Format::Json) {
        let p = out.path("", "json");
        write_json(&p, rep)?;
        files.push(p);
    }
    Ok(files)
}

/// Static targets on the centered state.
pub fn run_ipc(cfg: &ExperimentConfig) -> Result<CapacityRun, CliError> {
    run_capacity(cfg, Targets::Static)
}

/// Temporal targets on the detrended state (one Fourier component per
/// column unless the sweep says otherwise).
pub fn run_tipc(cfg: &ExperimentConfig) -> Result<CapacityRun, CliError> {
    run_capacity(cfg, Targets::Temporal)
}

/// Writes the state and its input as CSV, in the layout `csv` systems read.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let prep = prepare(cfg)?;
    let s = &prep.state;
    let header: Vec<String> = match &s.labels {
        Some(l) => l.clone(),
        None => (0..s.cols()).map(|j| format!("x{j}")).collect(),
    };
    let header_ref: Vec<&str> = header.iter().map(|h| h.as_str()).collect();
    let data = s.data();
    let state_path = cfg.output.path("state", "csv");
    write_csv(
        &state_path,
        &header_ref,
        (0..s.rows()).map(|i| (0..s.cols()).map(move |j| data[(i, j)].to_string()).collect::<Vec<_>>()),
    )?;
    let input_path = cfg.output.path("input", "csv");
    write_csv(&input_path, &["zeta"], prep.zeta.iter().map(|z| [z.to_string()]))?;
    Ok(vec![state_path, input_path])
}

/// Polynomial table and the empirical Gram matrix of the basis on the
/// configured input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDump {
    pub family: String,
    pub degree: usize,
    pub samples: usize,
    /// `gram[i][j] = mean P_i(zeta) P_j(zeta)` over the input sample.
    pub gram: Vec<Vec<f64>>,
}

const BASIS_POINTS: usize = 201;

pub fn run_basis(cfg: &ExperimentConfig) -> Result<(BasisDump, Vec<PathBuf>), CliError> {
    cfg.validate()?;
    let zeta = sample(&cfg.input.distribution, cfg.input.washout + cfg.input.length, cfg.input.seed)?;
    let fam = family(&cfg.sweep.family, &zeta)?;
    let degree = cfg.sweep.max_degree.min(fam.max_degree());
    let mut row = vec![0.0; degree + 1];
    let mut gram = vec![vec![0.0; degree + 1]; degree + 1];
    for &z in &zeta {
        fam.eval_all(z, &mut row);
        for i in 0..=degree {
            for j in 0..=degree {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    for g in gram.iter_mut().flatten() {
        *g /= zeta.len() as f64;
    }
    // Evaluation points: sample quantiles, which collapse to the support
    // for discrete laws.
    let mut sorted = zeta.clone();
    sorted.sort_by(f64::total_cmp);
    let mut points: Vec<f64> = (0..BASIS_POINTS)
        .map(|k| sorted[k * (sorted.len() - 1) / (BASIS_POINTS - 1)])
        .collect();
    points.dedup();
    let mut header = vec!["zeta".to_string()];
    header.extend((0..=degree).map(|n| format!("p{n}")));
    let header_ref: Vec<&str> = header.iter().map(|h| h.as_str()).collect();
    let mut files = Vec::new();
    let dump = BasisDump {
        family: fam.name().to_string(),
        degree,
        samples: zeta.len(),
        gram,
    };
    if cfg.output.wants(Format::Csv) {
        let p = cfg.output.path("basis", "csv");
        write_csv(
            &p,
            &header_ref,
            points.iter().map(|&z| {
                let mut r = vec![0.0; degree + 1];
                fam.eval_all(z, &mut r);
                std::iter::once(z).chain(r).map(|v| v.to_string()).collect::<Vec<_>>()
            }),
        )?;
        files.push(p);
    }
    if cfg.output.wants(Format::Json) {
        let p = cfg.output.path("basis", "json");
        write_json(&p, &dump)?;
        files.push(p);
    }
    Ok((dump, files))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub mode: InputMode,
    pub horizon: usize,
    pub points: Vec<SurvivalPoint>,
    /// First `sigma` at which survival drops through 1/2, linearly
    /// interpolated.
    pub knee: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovRow {
    pub sigma: f64,
    #[serde(with = "extended_f64::vec")]
    pub exponents: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxTerm {
    pub spec: String,
    pub coefficient: f64,
    pub predicted_capacity: f64,
    pub measured_capacity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub p: f64,
    pub terms: Vec<ApproxTerm>,
    /// Overlap of the approximate and true traces after the washout.
    #[serde(with = "extended_f64")]
    pub trace_nrmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutRow {
    pub activation: Activation,
    pub rho: f64,
    pub weight_seed: u64,
    /// Infinite when the reservoir diverged.
    #[serde(with = "extended_f64")]
    pub nrmse: f64,
    pub first_order: Option<f64>,
    pub second_order: Option<f64>,
    /// Largest capacity among the cross pairs `1@s*1@(s+9)`.
    pub max_cross_term: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutSummary {
    pub activation: Activation,
    pub rho: f64,
    #[serde(with = "extended_f64")]
    pub mean_nrmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutResult {
    pub rows: Vec<ReadoutRow>,
    pub summary: Vec<ReadoutSummary>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub divergence: Option<DivergenceResult>,
    pub basin_reduced: Option<BasinGrid>,
    pub basin_psi_sigma: Option<BasinGrid>,
    pub lyapunov: Option<Vec<LyapunovRow>>,
    pub approx_model: Option<ApproxResult>,
    pub readout: Option<ReadoutResult>,
}

fn knee(points: &[SurvivalPoint]) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (a.p >= 0.5 && b.p < 0.5).then(|| a.sigma + (a.p - 0.5) / (a.p - b.p) * (b.sigma - a.sigma))
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn write_basin(out: &OutputConfig, name: &str, g: &BasinGrid, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let p = out.path(name, "csv");
    let rows = g.y.iter().enumerate().flat_map(|(i, &y)| {
        g.x.iter()
            .enumerate()
            .map(move |(j, &x)| [x.to_string(), y.to_string(), g.steps[i][j].map_or(String::new(), |s| s.to_string())])
    });
    write_csv(&p, &[g.x_label.as_str(), g.y_label.as_str(), "diverged_at"], rows)?;
    files.push(p);
    Ok(())
}

fn sweep_linear_cross(max_delay: usize) -> Vec<tipc::polychaos::ChaosSpec> {
    SweepSpec::new(2, max_delay).enumerate()
}

/// Runs every task block present and writes its tables.
pub fn run_narma_suite(cfg: &NarmaSuiteConfig) -> Result<(SuiteReport, Vec<PathBuf>), CliError> {
    cfg.validate()?;
    let out = &cfg.output;
    let csv = out.wants(Format::Csv);
    let mut files = Vec::new();
    let mut rep = SuiteReport {
        version: tipc::VERSION.to_string(),
        ..Default::default()
    };

    if let Some(t) = &cfg.divergence {
        let sigmas = t.sigmas.values();
        let base = Narma10Config::new(t.mode.shaping(sigmas.first().copied().unwrap_or(0.0)));
        let points = divergence_probability(&base, &sigmas, t.mode, t.n_seeds, t.horizon, t.seed)?;
        if csv {
            let p = out.path("divergence", "csv");
            write_csv(
                &p,
                &["sigma", "p", "survived", "runs"],
                points
                    .iter()
                    .map(|s| [s.sigma.to_string(), s.p.to_string(), s.survived.to_string(), s.runs.to_string()]),
            )?;
            files.push(p);
        }
        rep.divergence = Some(DivergenceResult {
            mode: t.mode,
            horizon: t.horizon,
            knee: knee(&points),
            points,
        });
    }

    if let Some(t) = &cfg.basin_reduced {
        let c = Narma10Config::new(t.mode.shaping(t.sigma));
        let g = basin_scan_reduced(&c, &t.w1.values(), &t.w2.values(), t.max_steps, t.seed)?;
        if csv {
            write_basin(out, "basin_reduced", &g, &mut files)?;
        }
        rep.basin_reduced = Some(g);
    }

    if let Some(t) = &cfg.basin_psi_sigma {
        let c = Narma10Config::new(t.mode.shaping(0.0));
        let g = basin_scan_psi_sigma(&c, &t.psi.values(), &t.sigma.values(), t.mode, t.max_steps, t.seed)?;
        if csv {
            write_basin(out, "basin_psi_sigma", &g, &mut files)?;
        }
        rep.basin_psi_sigma = Some(g);
    }

    if let Some(t) = &cfg.lyapunov {
        let zeta = sample(&DistributionSpec::uniform(), t.settings.required_input(), t.seed)?;
        let rows = t
            .sigmas
            .values()
            .into_iter()
            .map(|sigma| {
                let c = Narma10Config::new(t.mode.shaping(sigma));
                Ok(LyapunovRow {
                    sigma,
                    exponents: lyapunov_spectrum(&c, &t.settings, &zeta)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        if csv {
            let p = out.path("lyapunov", "csv");
            let mut header = vec!["sigma".to_string()];
            header.extend((1..=t.settings.n_exponents).map(|k| format!("lambda{k}")));
            let header_ref: Vec<&str> = header.iter().map(|h| h.as_str()).collect();
            write_csv(
                &p,
                &header_ref,
                rows.iter().map(|r| {
                    std::iter::once(r.sigma).chain(r.exponents.iter().copied()).map(|v| v.to_string()).collect::<Vec<_>>()
                }),
            )?;
            files.push(p);
        }
        rep.lyapunov = Some(rows);
    }

    if let Some(t) = &cfg.approx_model {
        let c = Narma10Config::new(t.mode.shaping(t.sigma));
        let co = approx_model_coeffs(&c, &t.linear_delays, &t.cross_delays)?;
        if t.washout < co.max_delay() {
            return Err(CliError::config(format!(
                "approx_model.washout: must cover the model's longest delay {}",
                co.max_delay()
            )));
        }
        let zeta = sample(&DistributionSpec::uniform(), t.washout + t.length, t.seed)?;
        let approx = simulate_approx_model(&co, &zeta)?;
        let truth = simulate_narma10(&c, &zeta)?;
        if let Some(step) = truth.diverged_at {
            return Err(CliError::Numeric(format!("NARMA10 diverged at step {step}")));
        }
        // Both index time t; the final approximate value has no input left.
        let a = &approx.values[t.washout - approx.start..approx.values.len() - 1];
        let y = &truth.series[t.washout..t.washout + a.len()];
        let measured = if t.measure_ipc {
            let fam = PolynomialFamily::Legendre;
            let state = StateMatrix::from_column(a, t.washout)?;
            let specs = sweep_linear_cross(co.max_delay() + 4);
            Some(analyze(&state, &zeta, &fam, &specs, &AnalysisOptions::default())?)
        } else {
            None
        };
        let coefs = co
            .q
            .iter()
            .map(|&(s, v)| (format!("1@{s}"), v))
            .chain(co.r.iter().map(|&(s, v)| (format!("1@{}*1@{}", s, s + 9), v)));
        // E[P1(zeta)^2] = 1/3 for uniform zeta.
        let terms: Vec<ApproxTerm> = coefs
            .zip(co.predicted_capacities(1.0 / 3.0))
            .map(|((spec, coefficient), (_, predicted))| ApproxTerm {
                measured_capacity: measured.as_ref().map(|m| m.thresholded(&spec)),
                spec,
                coefficient,
                predicted_capacity: predicted,
            })
            .collect();
        let res = ApproxResult {
            p: co.p,
            terms,
            trace_nrmse: nrmse(a, y),
        };
        if csv {
            let p = out.path("approx_terms", "csv");
            write_csv(
                &p,
                &["spec", "coefficient", "predicted_capacity", "measured_capacity"],
                res.terms.iter().map(|x| {
                    [
                        x.spec.clone(),
                        x.coefficient.to_string(),
                        x.predicted_capacity.to_string(),
                        fmt_opt(x.measured_capacity),
                    ]
                }),
            )?;
            files.push(p);
            let p = out.path("approx_overlay", "csv");
            write_csv(
                &p,
                &["t", "narma10", "approx"],
                a.iter().zip(y).enumerate().map(|(i, (av, yv))| {
                    [(t.washout + i).to_string(), yv.to_string(), av.to_string()]
                }),
            )?;
            files.push(p);
        }
        rep.approx_model = Some(res);
    }

    if let Some(t) = &cfg.readout {
        let zeta = sample(&DistributionSpec::uniform(), t.washout + t.length, t.seed)?;
        let narma = simulate_narma10(&Narma10Config::new(t.mode.shaping(t.sigma)), &zeta)?;
        if let Some(step) = narma.diverged_at {
            return Err(CliError::Numeric(format!("NARMA10 target diverged at step {step}")));
        }
        let target = &narma.series[t.washout..t.washout + t.length];
        let split = ReadoutSplit {
            train_fraction: t.train_fraction,
        };
        let specs = (t.ipc_max_delay > 0).then(|| sweep_linear_cross(t.ipc_max_delay));
        let fam = PolynomialFamily::Legendre;
        let mut rows = Vec::new();
        let mut summary = Vec::new();
        for &act in &t.activations {
            for rho in t.rhos.values() {
                let mut acc = 0.0;
                for &seed in &t.weight_seeds {
                    let mut ec = EsnConfig::new(act, rho, seed);
                    ec.input_intensity = t.input_intensity;
                    let mut row = ReadoutRow {
                        activation: act,
                        rho,
                        weight_seed: seed,
                        nrmse: f64::INFINITY,
                        first_order: None,
                        second_order: None,
                        max_cross_term: None,
                    };
                    match simulate_esn(&ec, &zeta, t.washout) {
                        Ok(state) => {
                            let r = train_readout(&state, target, split)?;
                            row.nrmse = r.nrmse;
                            if let Some(specs) = &specs {
                                let o = StateMatrix::from_column(&r.prediction, t.washout)?;
                                let ipc = analyze(&o, &zeta, &fam, specs, &AnalysisOptions::default())?;
                                row.first_order = Some(ipc.order_total(1));
                                row.second_order = Some(ipc.order_total(2));
                                row.max_cross_term = Some(
                                    (1..=t.ipc_max_delay.saturating_sub(9))
                                        .map(|s| ipc.thresholded(&format!("1@{s}*1@{}", s + 9)))
                                        .fold(0.0, f64::max),
                                );
                            }
                        }
                        Err(tipc::systems::SystemError::Divergence { .. }) => {}
                        Err(e) => return Err(e.into()),
                    }
                    acc += row.nrmse;
                    rows.push(row);
                }
                summary.push(ReadoutSummary {
                    activation: act,
                    rho,
                    mean_nrmse: acc / t.weight_seeds.len() as f64,
                });
            }
        }
        if csv {
            let name = |a: Activation| serde_json::to_value(a).ok().and_then(|v| v.as_str().map(String::from));
            let p = out.path("readout", "csv");
            write_csv(
                &p,
                &["activation", "rho", "weight_seed", "nrmse", "first_order", "second_order", "max_cross_term"],
                rows.iter().map(|r| {
                    [
                        name(r.activation).unwrap_or_default(),
                        r.rho.to_string(),
                        r.weight_seed.to_string(),
                        r.nrmse.to_string(),
                        fmt_opt(r.first_order),
                        fmt_opt(r.second_order),
                        fmt_opt(r.max_cross_term),
                    ]
                }),
            )?;
            files.push(p);
            let p = out.path("readout_summary", "csv");
            write_csv(
                &p,
                &["activation", "rho", "mean_nrmse"],
                summary
                    .iter()
                    .map(|s| [name(s.activation).unwrap_or_default(), s.rho.to_string(), s.mean_nrmse.to_string()]),
            )?;
            files.push(p);
        }
        rep.readout = Some(ReadoutResult { rows, summary });
    }

    if out.wants(Format::Json) {
        let p = out.path("", "json");
        write_json(&p, &rep)?;
        files.push(p);
    }
    Ok((rep, files))
}
