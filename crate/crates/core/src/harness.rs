//! Model presets and the seeded multi-run experiment loop.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{gen_graph, gen_signals, is_connected, GraphFamily, GraphSpec, SignalSpec};
use crate::error::{MuglError, Result};
use crate::eval::{score, EdgeMetrics, DEFAULT_THRESHOLD};
use crate::laplacian::{expand, GraphLaplacian, WeightVector};
use crate::moments::{empirical_moments, rho1_radius, rho2_radius, spectral_norm, RadiusParams, SignalMatrix};
use crate::objective::{build_context, ModelConfig, Regularizer};
use crate::solvers::{ls_pgd_solve, pgd_solve, SolveReport, SolverOptions, Termination};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_BETA: f64 = 0.5;
/// Fixed step used by the VSGL preset. Its objective is linear, so any step
/// is admissible and a large one reaches the optimal vertex quickly.
pub const VSGL_STEP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Robust model, no regularizer.
    MuglO,
    /// Robust model with the log-barrier degree regularizer.
    MuglL,
    /// Vanilla smooth graph learning: the empirical risk alone.
    Vsgl,
    /// Non-robust log-barrier model with a squared off-diagonal penalty.
    LogModel,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::MuglO => "mugl_o",
            ModelKind::MuglL => "mugl_l",
            ModelKind::Vsgl => "vsgl",
            ModelKind::LogModel => "log_model",
        }
    }

    fn robust(self) -> bool {
        matches!(self, ModelKind::MuglO | ModelKind::MuglL)
    }

    fn barrier(self) -> bool {
        matches!(self, ModelKind::MuglL | ModelKind::LogModel)
    }
}

/// Radius constants; `sigma_norm` defaults to the spectral norm of the
/// sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calibration {
    pub delta: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub sigma_norm: Option<f64>,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            delta: RadiusParams::DEFAULT_DELTA,
            c0: RadiusParams::DEFAULT_C0,
            c1: RadiusParams::DEFAULT_C1,
            c2: RadiusParams::DEFAULT_C2,
            sigma_norm: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiiSource {
    Explicit { rho1: f64, rho2: f64 },
    Calibrated(Calibration),
}

impl Default for RadiiSource {
    fn default() -> Self {
        RadiiSource::Calibrated(Calibration::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelPreset {
    pub model: ModelKind,
    /// Name used in summaries; defaults to the model name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub radii: RadiiSource,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub solver: Option<SolverOptions>,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

impl ModelPreset {
    pub fn new(model: ModelKind) -> Self {
        Self {
            model,
            label: None,
            radii: RadiiSource::default(),
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            solver: None,
        }
    }

    pub fn with_radii(mut self, rho1: f64, rho2: f64) -> Self {
        self.radii = RadiiSource::Explicit { rho1, rho2 };
        self
    }

    pub fn with_solver(mut self, opts: SolverOptions) -> Self {
        self.solver = Some(opts);
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.model.name())
    }

    /// Solver options in effect: the explicit ones, else the defaults for
    /// this model.
    pub fn solver_options(&self) -> SolverOptions {
        self.solver.unwrap_or_else(|| match self.model {
            ModelKind::Vsgl => SolverOptions {
                step: VSGL_STEP,
                ..SolverOptions::default()
            },
            _ => SolverOptions::default(),
        })
    }

    /// Copy with every default written out.
    pub fn materialized(&self) -> Self {
        let mut p = self.clone();
        p.label = Some(self.label().to_string());
        p.solver = Some(self.solver_options());
        p
    }

    /// Checks every parameter that does not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(MuglError::InvalidParameter(what));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be non-negative, got {}", self.beta));
        }
        match self.radii {
            RadiiSource::Explicit { rho1, rho2 } => {
                if !(rho1 >= 0.0 && rho1.is_finite() && rho2 >= 0.0 && rho2.is_finite()) {
                    return bad(format!("radii must be non-negative, got rho1={rho1}, rho2={rho2}"));
                }
            }
            RadiiSource::Calibrated(c) => {
                RadiusParams::new(c.delta, c.c0, c.c1, c.c2, c.sigma_norm.unwrap_or(1.0))?;
            }
        }
        self.solver_options()
            .validate()
            .map_err(|e| MuglError::InvalidParameter(format!("solver: {e}")))
    }

    /// Resolves the objective configuration for data with these moments.
    pub fn model_config(&self, moments: &crate::moments::EmpiricalMoments) -> Result<ModelConfig> {
        let m = moments.nodes();
        let (rho1, rho2) = if self.model.robust() {
            match self.radii {
                RadiiSource::Explicit { rho1, rho2 } => (rho1, rho2),
                RadiiSource::Calibrated(c) => {
                    let params = RadiusParams::new(
                        c.delta,
                        c.c0,
                        c.c1,
                        c.c2,
                        c.sigma_norm.unwrap_or_else(|| spectral_norm(&moments.cov)),
                    )?;
                    (
                        rho1_radius(&params, moments.samples)?,
                        rho2_radius(&params, m, moments.samples)?,
                    )
                }
            }
        } else {
            (0.0, 0.0)
        };
        let regularizer = if self.model.barrier() {
            Regularizer::LogBarrier { alpha: self.alpha }
        } else {
            Regularizer::None
        };
        let mut config = ModelConfig::new(rho1, rho2, m as f64, regularizer);
        if self.model == ModelKind::LogModel {
            config.edge_penalty = self.beta;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Result of [`learn`].
#[derive(Debug, Clone)]
pub struct Learned {
    pub laplacian: GraphLaplacian,
    pub report: SolveReport,
    pub config: ModelConfig,
}

/// Fits one preset to the signals, starting from the simplex centroid with
/// scale `s = m`. Log-barrier presets use the line-search solver.
pub fn learn(preset: &ModelPreset, x: &SignalMatrix) -> Result<Learned> {
    preset.validate()?;
    let moments = empirical_moments(x)?;
    let config = preset.model_config(&moments)?;
    let m = moments.nodes();
    let ctx = build_context(moments, config)?;
    let w0 = WeightVector::centroid(m, config.s);
    let opts = preset.solver_options();
    let report = if preset.model.barrier() {
        ls_pgd_solve(&ctx, w0.as_slice(), &opts)?
    } else {
        pgd_solve(&ctx, w0.as_slice(), &opts)?
    };
    Ok(Learned {
        laplacian: expand(&report.weights()),
        report,
        config,
    })
}

/// Signal settings shared by every run of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSettings {
    pub n: usize,
    pub epsilon: f64,
    #[serde(default)]
    pub mu_star: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub family: GraphFamily,
    pub m: usize,
    pub signals: SignalSettings,
    pub presets: Vec<ModelPreset>,
    pub n_seeds: usize,
    pub master_seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl Experiment {
    /// Seed of run `index`: graph and signals share it on separate streams.
    pub fn run_seed(&self, index: usize) -> u64 {
        self.master_seed.wrapping_add(index as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.presets.is_empty() {
            return Err(MuglError::InvalidParameter("preset list is empty".into()));
        }
        if self.n_seeds == 0 {
            return Err(MuglError::InvalidParameter("n_seeds must be at least 1".into()));
        }
        for (k, p) in self.presets.iter().enumerate() {
            p.validate()
                .map_err(|e| MuglError::InvalidParameter(format!("presets[{k}]: {e}")))?;
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(MuglError::InvalidParameter(format!(
                "threshold must lie in [0, 1), got {}",
                self.threshold
            )));
        }
        GraphSpec {
            family: self.family,
            m: self.m,
            seed: 0,
        }
        .validate()?;
        SignalSpec {
            n: self.signals.n,
            epsilon: self.signals.epsilon,
            mu_star: self.signals.mu_star.clone(),
            seed: 0,
        }
        .validate(self.m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetOutcome {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<EdgeMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PresetOutcome {
    fn failed(label: &str, error: String) -> Self {
        Self {
            label: label.to_string(),
            metrics: None,
            termination: None,
            iters: None,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub index: usize,
    pub seed: u64,
    pub true_edges: usize,
    pub connected: bool,
    pub outcomes: Vec<PresetOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub model: String,
    pub metric: String,
    pub mean: f64,
    pub normalized_std_percent: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: Experiment,
    pub records: Vec<SeedRecord>,
    pub metrics: Vec<MetricSummary>,
    pub failed_runs: usize,
    pub version: String,
}

impl ExperimentSummary {
    /// True when no preset produced metrics on any seed.
    pub fn all_failed(&self) -> bool {
        self.records
            .iter()
            .all(|r| r.outcomes.iter().all(|o| o.metrics.is_none()))
    }

    pub fn mean(&self, model: &str, metric: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|s| s.model == model && s.metric == metric)
            .map(|s| s.mean)
    }
}

pub const METRIC_NAMES: [&str; 4] = ["f_measure", "precision", "recall", "nmi"];

fn metric_value(m: &EdgeMetrics, name: &str) -> f64 {
    match name {
        "f_measure" => m.f_measure,
        "precision" => m.precision,
        "recall" => m.recall,
        "nmi" => m.nmi,
        _ => unreachable!("unknown metric {name}"),
    }
}

/// Mean and population standard deviation over mean, in percent. The
/// normalized deviation is 0 for a single value or a zero mean.
pub fn mean_and_normalized_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let nstd = if values.len() < 2 || mean == 0.0 {
        0.0
    } else {
        100.0 * var.sqrt() / mean
    };
    (mean, nstd)
}

fn run_one(exp: &Experiment, index: usize) -> SeedRecord {
    let seed = exp.run_seed(index);
    let graph = gen_graph(&GraphSpec {
        family: exp.family,
        m: exp.m,
        seed,
    });
    let graph = match graph {
        Ok(g) => g,
        Err(e) => {
            return SeedRecord {
                index,
                seed,
                true_edges: 0,
                connected: false,
                outcomes: exp
                    .presets
                    .iter()
                    .map(|p| PresetOutcome::failed(p.label(), e.to_string()))
                    .collect(),
            }
        }
    };
    let truth: Vec<bool> = graph.laplacian.weights().as_slice().iter().map(|&w| w > 0.0).collect();
    let signals = gen_signals(
        &graph.laplacian,
        &SignalSpec {
            n: exp.signals.n,
            epsilon: exp.signals.epsilon,
            mu_star: exp.signals.mu_star.clone(),
            seed,
        },
    );
    let outcomes = exp
        .presets
        .iter()
        .map(|preset| {
            let learned = signals.as_ref().map_err(Clone::clone).and_then(|x| learn(preset, x));
            let learned = learned.and_then(|l| {
                if l.report.termination == Termination::NonsmoothAbort {
                    Err(MuglError::NonsmoothPoint {
                        value: f64::NAN,
                        floor: f64::NAN,
                    })
                } else {
                    Ok(l)
                }
            });
            match learned.and_then(|l| {
                score(&l.report.w_final, &truth, exp.threshold).map(|metrics| (l, metrics))
            }) {
                Ok((l, metrics)) => PresetOutcome {
                    label: preset.label().to_string(),
                    metrics: Some(metrics),
                    termination: Some(l.report.termination),
                    iters: Some(l.report.iters),
                    error: None,
                },
                Err(e) => PresetOutcome::failed(preset.label(), e.to_string()),
            }
        })
        .collect();
    SeedRecord {
        index,
        seed,
        true_edges: truth.iter().filter(|&&b| b).count(),
        connected: is_connected(&graph.laplacian),
        outcomes,
    }
}

/// Runs every preset on `n_seeds` independently generated graph/signal pairs
/// and aggregates the edge metrics. Seeds run on `threads` workers and are
/// merged in seed order, so the summary does not depend on the thread count.
pub fn run_experiment(exp: &Experiment, threads: usize) -> Result<ExperimentSummary> {
    exp.validate()?;
    let mut exp = exp.clone();
    exp.presets = exp.presets.iter().map(ModelPreset::materialized).collect();
    let records: Vec<SeedRecord> = if threads <= 1 {
        (0..exp.n_seeds).map(|i| run_one(&exp, i)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| MuglError::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..exp.n_seeds).into_par_iter().map(|i| run_one(&exp, i)).collect())
    };
    Ok(summarize(exp, records))
}

/// Aggregates per-seed records into per-model metric summaries.
pub fn summarize(exp: Experiment, records: Vec<SeedRecord>) -> ExperimentSummary {
    let mut metrics = Vec::new();
    for preset in &exp.presets {
        let label = preset.label();
        let ok: Vec<&EdgeMetrics> = records
            .iter()
            .filter_map(|r| r.outcomes.iter().find(|o| o.label == label))
            .filter_map(|o| o.metrics.as_ref())
            .collect();
        for name in METRIC_NAMES {
            let values: Vec<f64> = ok.iter().map(|m| metric_value(m, name)).collect();
            let (mean, nstd) = mean_and_normalized_std(&values);
            metrics.push(MetricSummary {
                model: label.to_string(),
                metric: name.to_string(),
                mean,
                normalized_std_percent: nstd,
                n_seeds: values.len(),
            });
        }
    }
    let failed_runs = records
        .iter()
        .flat_map(|r| &r.outcomes)
        .filter(|o| o.metrics.is_none())
        .count();
    ExperimentSummary {
        experiment: exp,
        records,
        metrics,
        failed_runs,
        version: crate::VERSION.to_string(),
    }
}
