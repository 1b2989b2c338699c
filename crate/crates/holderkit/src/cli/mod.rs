//! Config-driven orchestration: parse a run config, execute the requested
//! analyses, and emit `report.json` plus any `paths.csv`/`constants.csv`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceModel, SelfSimilarProfile, SpectralMeasure, VolterraKernel};
use crate::error::{Error, Result};
use crate::pathstats::{
    default_exponent_lags, exp_moment_estimate, path_holder_constant, path_holder_exponent,
    MomentEstimate,
};
use crate::quad::QuadSettings;
use crate::regularity::{
    alos_check, default_xy_pairs, divergence_scan, dyadic_lags, dyadic_refinement_grids,
    fit_holder_exponent, fredholm_dominating_check, kc_check, metric_decay,
    selfsimilar_conditions_check, selfsimilar_sufficient_check, stationary_increment_check,
    volterra_conditions_check, ConditionFit, ConditionVerdict, ExponentFit,
};
use crate::simulate::{paths_to_csv, sample_paths, Method, SamplePath, SimulationPlan};

/// Tool version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Analyses a config may request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisKind {
    MetricFit,
    Kc,
    Divergence,
    Volterra,
    Alos,
    Selfsimilar,
    SelfsimilarSufficient,
    Fredholm,
    StationaryIncrement,
    Spectral,
    Simulate,
    Pathstats,
}

impl AnalysisKind {
    pub fn name(&self) -> &'static str {
        match self {
            AnalysisKind::MetricFit => "metric-fit",
            AnalysisKind::Kc => "kc",
            AnalysisKind::Divergence => "divergence",
            AnalysisKind::Volterra => "volterra",
            AnalysisKind::Alos => "alos",
            AnalysisKind::Selfsimilar => "selfsimilar",
            AnalysisKind::SelfsimilarSufficient => "selfsimilar-sufficient",
            AnalysisKind::Fredholm => "fredholm",
            AnalysisKind::StationaryIncrement => "stationary-increment",
            AnalysisKind::Spectral => "spectral",
            AnalysisKind::Simulate => "simulate",
            AnalysisKind::Pathstats => "pathstats",
        }
    }
}

/// Model section of the config: a kind plus the parameters it needs.
/// Parameters that the kind does not use are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl ModelConfig {
    fn provided(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.hurst.is_some() {
            v.push("hurst");
        }
        if self.horizon.is_some() {
            v.push("horizon");
        }
        if self.sigma.is_some() {
            v.push("sigma");
        }
        if self.rate.is_some() {
            v.push("rate");
        }
        if self.beta.is_some() {
            v.push("beta");
        }
        if self.value.is_some() {
            v.push("value");
        }
        if self.lambda_max.is_some() {
            v.push("lambda_max");
        }
        if self.t_max.is_some() {
            v.push("t_max");
        }
        v
    }

    fn check_allowed(&self, allowed: &[&str]) -> Result<()> {
        for key in self.provided() {
            if !allowed.contains(&key) {
                return Err(Error::Config(format!(
                    "model key `{key}` is not used by kind `{}`",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn req(&self, value: Option<f64>, name: &str) -> Result<f64> {
        value.ok_or_else(|| {
            Error::Config(format!(
                "model kind `{}` requires key `{name}`",
                self.kind
            ))
        })
    }

    /// Build the covariance model this section describes.
    pub fn build(&self) -> Result<CovarianceModel> {
        let horizon = self.horizon.unwrap_or(1.0);
        match self.kind.as_str() {
            "fbm" => {
                self.check_allowed(&["hurst", "horizon"])?;
                CovarianceModel::fbm(self.req(self.hurst, "hurst")?, horizon)
            }
            "bm" => {
                self.check_allowed(&["horizon"])?;
                CovarianceModel::bm(horizon)
            }
            "ou" => {
                self.check_allowed(&["sigma", "rate", "horizon"])?;
                CovarianceModel::ou(
                    self.sigma.unwrap_or(1.0),
                    self.rate.unwrap_or(1.0),
                    horizon,
                )
            }
            "indicator" => {
                self.check_allowed(&["horizon"])?;
                CovarianceModel::volterra(
                    VolterraKernel::indicator(),
                    horizon,
                    QuadSettings::default(),
                )
            }
            "riemann-liouville" => {
                self.check_allowed(&["hurst", "horizon"])?;
                CovarianceModel::volterra(
                    VolterraKernel::riemann_liouville(self.req(self.hurst, "hurst")?)?,
                    horizon,
                    QuadSettings::default(),
                )
            }
            "selfsimilar-constant" => {
                self.check_allowed(&["value", "beta", "horizon"])?;
                CovarianceModel::self_similar(
                    SelfSimilarProfile::constant(
                        self.value.unwrap_or(1.0),
                        self.req(self.beta, "beta")?,
                    )?,
                    horizon,
                    QuadSettings::default(),
                )
            }
            "selfsimilar-power" => {
                self.check_allowed(&["beta", "hurst", "horizon"])?;
                CovarianceModel::self_similar(
                    SelfSimilarProfile::power(
                        self.req(self.beta, "beta")?,
                        self.req(self.hurst, "hurst")?,
                    )?,
                    horizon,
                    QuadSettings::default(),
                )
            }
            "spectral-ou" => {
                self.check_allowed(&["sigma", "rate", "lambda_max", "horizon"])?;
                CovarianceModel::spectral(
                    SpectralMeasure::ou(
                        self.sigma.unwrap_or(1.0),
                        self.rate.unwrap_or(1.0),
                        self.lambda_max.unwrap_or(1e6),
                    )?,
                    horizon,
                    QuadSettings::default(),
                )
            }
            "modulated-fbm" => {
                self.check_allowed(&["hurst", "t_max"])?;
                CovarianceModel::modulated_fbm(
                    self.hurst.unwrap_or(0.5),
                    self.t_max.unwrap_or(0.3),
                )
            }
            other => Err(Error::Config(format!(
                "unknown model kind `{other}`; expected one of fbm, bm, ou, indicator, \
                 riemann-liouville, selfsimilar-constant, selfsimilar-power, spectral-ou, \
                 modulated-fbm"
            ))),
        }
    }
}

/// Grid section: either a uniform point count or explicit points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
}

impl GridConfig {
    /// Materialize the grid on `[0, horizon]` (default: 1024 uniform points).
    pub fn build(&self, horizon: f64) -> Result<Vec<f64>> {
        match (&self.n, &self.points) {
            (Some(_), Some(_)) => Err(Error::Config(
                "grid keys `n` and `points` are mutually exclusive".into(),
            )),
            (_, Some(points)) => {
                if points.len() < 2 || points.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config(
                        "grid `points` must be strictly increasing with >= 2 entries".into(),
                    ));
                }
                Ok(points.clone())
            }
            (n, None) => {
                let n = n.unwrap_or(1024);
                if n < 2 {
                    return Err(Error::Config("grid `n` must be at least 2".into()));
                }
                Ok((0..n)
                    .map(|i| horizon * i as f64 / (n - 1) as f64)
                    .collect())
            }
        }
    }
}

fn default_epsilons() -> Vec<f64> {
    vec![0.1]
}

fn default_seed() -> u64 {
    42
}

fn default_n_paths() -> usize {
    64
}

/// A full run configuration. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub analyses: Vec<AnalysisKind>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst_candidate: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

/// Strictly parse a config and validate its cross-field invariants.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.build()?;
        self.grid
            .build(self.model.horizon.unwrap_or(1.0))?;
        if let Some(h) = self.hurst_candidate {
            if !(h > 0.0 && h <= 1.0) {
                return Err(Error::Config(format!(
                    "`hurst_candidate` = {h} must lie in (0, 1]"
                )));
            }
            for &eps in &self.epsilons {
                if !(eps > 0.0 && eps < h) {
                    return Err(Error::Config(format!(
                        "`epsilons` entry {eps} must lie in (0, hurst_candidate = {h})"
                    )));
                }
            }
        } else if self.epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Config("`epsilons` entries must be positive".into()));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("`n_paths` must be at least 1".into()));
        }
        Ok(())
    }

    /// The H candidate, required by several analyses.
    fn require_h(&self) -> Result<f64> {
        self.hurst_candidate.ok_or_else(|| {
            Error::Config("this analysis requires `hurst_candidate`".into())
        })
    }

    fn first_eps(&self) -> Result<f64> {
        self.epsilons.first().copied().ok_or_else(|| {
            Error::Config("this analysis requires a nonempty `epsilons` list".into())
        })
    }
}

/// One executed (or failed) analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub name: String,
    pub wall_clock_ms: f64,
    pub outcome: AnalysisOutcome,
}

/// Typed result payloads; `Error` records a failure without aborting the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AnalysisOutcome {
    Fit {
        fit: ExponentFit,
    },
    ConditionFits {
        forward: ConditionFit,
        increment: ConditionFit,
    },
    Verdicts {
        verdicts: Vec<ConditionVerdict>,
    },
    Divergence {
        scans: Vec<DivergenceScan>,
    },
    Paths {
        n_paths: usize,
        method: Method,
        file: String,
    },
    Pathstats {
        order: f64,
        max_constant: f64,
        mean_exponent: Option<f64>,
        moment: Option<MomentEstimate>,
        file: String,
    },
    Error {
        message: String,
    },
}

/// Kolmogorov-Centsov constants across a refining grid family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceScan {
    pub epsilon: f64,
    pub constants: Vec<f64>,
}

/// The run artifact written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub version: String,
    pub config: RunConfig,
    pub analyses: Vec<AnalysisRecord>,
}

impl RegularityReport {
    /// True when any computed verdict is violated (the `--strict` gate).
    pub fn has_violation(&self) -> bool {
        self.analyses.iter().any(|a| match &a.outcome {
            AnalysisOutcome::Verdicts { verdicts } => verdicts.iter().any(|v| !v.holds),
            _ => false,
        })
    }
}

fn kernel_of(model: &CovarianceModel) -> Result<VolterraKernel> {
    match model {
        CovarianceModel::Volterra { kernel, .. } => Ok(kernel.clone()),
        CovarianceModel::SelfSimilar { profile, .. } => Ok(profile.kernel()),
        _ => Err(Error::Capability(format!(
            "model kind `{}` has no Volterra kernel",
            model.kind_name()
        ))),
    }
}

fn profile_of(model: &CovarianceModel) -> Result<&SelfSimilarProfile> {
    match model {
        CovarianceModel::SelfSimilar { profile, .. } => Ok(profile),
        _ => Err(Error::Capability(format!(
            "model kind `{}` has no self-similar profile",
            model.kind_name()
        ))),
    }
}

/// Metric evaluations on closed-form models are cheap; quadrature-backed
/// ones are not, so pair scans run on a decimated grid.
fn is_quadrature_backed(model: &CovarianceModel) -> bool {
    matches!(
        model,
        CovarianceModel::Spectral { .. }
            | CovarianceModel::Volterra { .. }
            | CovarianceModel::SelfSimilar { .. }
    )
}

fn decimate(grid: &[f64], max_len: usize) -> Vec<f64> {
    if grid.len() <= max_len {
        return grid.to_vec();
    }
    let stride = grid.len().div_ceil(max_len);
    let mut out: Vec<f64> = grid.iter().copied().step_by(stride).collect();
    if *out.last().unwrap() != *grid.last().unwrap() {
        out.push(*grid.last().unwrap());
    }
    out
}

/// Stationary(-increment) models have `D(h) = d_X(0, h)`; a single base
/// point suffices and is exact.
fn metric_base_grid(model: &CovarianceModel, grid: &[f64]) -> Vec<f64> {
    match model {
        CovarianceModel::Fbm { .. }
        | CovarianceModel::Bm { .. }
        | CovarianceModel::Ou { .. }
        | CovarianceModel::Spectral { .. } => vec![0.0],
        _ => decimate(grid, 65),
    }
}

fn choose_method(model: &CovarianceModel, grid: &[f64]) -> Method {
    let uniform = grid.len() >= 2
        && grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - (grid[1] - grid[0])).abs() <= 1e-9 * (grid[1] - grid[0]));
    let circulant_capable = matches!(
        model,
        CovarianceModel::Fbm { .. }
            | CovarianceModel::Bm { .. }
            | CovarianceModel::ModulatedFbm { .. }
    );
    if uniform && circulant_capable && (grid[0] / (grid[1] - grid[0])).fract().abs() < 1e-9 {
        Method::Circulant
    } else {
        Method::Cholesky
    }
}

fn simulate_paths_for(config: &RunConfig, model: &CovarianceModel, grid: &[f64]) -> Result<(Vec<SamplePath>, Method)> {
    let method = choose_method(model, grid);
    let plan = SimulationPlan::new(model.clone(), grid.to_vec(), config.n_paths, config.seed)?
        .with_method(method);
    Ok((sample_paths(&plan)?, method))
}

fn run_analysis(
    kind: AnalysisKind,
    config: &RunConfig,
    model: &CovarianceModel,
    grid: &[f64],
    out_dir: &Path,
) -> Result<AnalysisOutcome> {
    let horizon = model.horizon();
    match kind {
        AnalysisKind::MetricFit => {
            let lags = dyadic_lags(horizon, 4, 16);
            let base = metric_base_grid(model, grid);
            let decay = metric_decay(model, &base, &lags)?;
            Ok(AnalysisOutcome::Fit {
                fit: fit_holder_exponent(&decay)?,
            })
        }
        AnalysisKind::Kc => {
            let h = config.require_h()?;
            let base = if is_quadrature_backed(model) {
                decimate(grid, 65)
            } else {
                decimate(grid, 257)
            };
            let mut verdicts = Vec::new();
            for &eps in &config.epsilons {
                verdicts.push(kc_check(model, h, eps, &base)?);
            }
            Ok(AnalysisOutcome::Verdicts { verdicts })
        }
        AnalysisKind::Divergence => {
            let h = config.require_h()?;
            let t_max = match model {
                CovarianceModel::ModulatedFbm { t_max, .. } => *t_max,
                _ => horizon,
            };
            let grids = dyadic_refinement_grids(t_max, &[6, 8, 10, 12, 14, 16, 18, 20]);
            // eps = 0 probes the gap itself and is always included.
            let mut epsilons = vec![0.0];
            epsilons.extend(config.epsilons.iter().copied().filter(|&e| e < h));
            let mut scans = Vec::new();
            for eps in epsilons {
                scans.push(DivergenceScan {
                    epsilon: eps,
                    constants: divergence_scan(model, h, eps, &grids)?,
                });
            }
            Ok(AnalysisOutcome::Divergence { scans })
        }
        AnalysisKind::Volterra => {
            let kernel = kernel_of(model)?;
            let base = decimate(grid, 33);
            let lags = dyadic_lags(horizon, 2, 10);
            let (forward, increment) =
                volterra_conditions_check(&kernel, &base, &lags, &QuadSettings::default())?;
            Ok(AnalysisOutcome::ConditionFits { forward, increment })
        }
        AnalysisKind::Alos => {
            let h = config.require_h()?;
            let kernel = kernel_of(model)?;
            let base = decimate(grid, 33);
            let verdict = alos_check(&kernel, h, &base, &QuadSettings::default())?;
            Ok(AnalysisOutcome::Verdicts {
                verdicts: vec![verdict],
            })
        }
        AnalysisKind::Selfsimilar => {
            let profile = profile_of(model)?;
            let base = decimate(grid, 33);
            let lags = dyadic_lags(horizon, 2, 10);
            let (forward, increment) =
                selfsimilar_conditions_check(profile, &base, &lags, &QuadSettings::default())?;
            Ok(AnalysisOutcome::ConditionFits { forward, increment })
        }
        AnalysisKind::SelfsimilarSufficient => {
            let h = config.require_h()?;
            let profile = profile_of(model)?;
            let verdict = selfsimilar_sufficient_check(profile, h, &default_xy_pairs(16))?;
            Ok(AnalysisOutcome::Verdicts {
                verdicts: vec![verdict],
            })
        }
        AnalysisKind::Fredholm => {
            let h = config.require_h()?;
            let eps = config.first_eps()?;
            let kernel = kernel_of(model)?;
            let base = decimate(grid, 33);
            // Dominating function realized on the grid: the smallest f(u)
            // that covers every scanned increment at this resolution.
            let f_samples: Vec<(f64, f64)> = base
                .iter()
                .map(|&u| {
                    let mut best = 0.0f64;
                    for (i, &s) in base.iter().enumerate() {
                        for &t in &base[i + 1..] {
                            let num = (kernel.eval(t, u) - kernel.eval(s, u)).abs();
                            best = best.max(num / (t - s).powf(h - eps));
                        }
                    }
                    (u, best)
                })
                .collect();
            let verdict = fredholm_dominating_check(
                |t, s| kernel.eval(t, s),
                &f_samples,
                h,
                eps,
                &base,
            )?;
            Ok(AnalysisOutcome::Verdicts {
                verdicts: vec![verdict],
            })
        }
        AnalysisKind::StationaryIncrement => {
            let lags = dyadic_lags(horizon, 2, 16);
            Ok(AnalysisOutcome::Fit {
                fit: stationary_increment_check(model, &lags)?,
            })
        }
        AnalysisKind::Spectral => {
            if !matches!(model, CovarianceModel::Spectral { .. }) {
                return Err(Error::Capability(format!(
                    "spectral analysis needs a spectral model, got `{}`",
                    model.kind_name()
                )));
            }
            let lags = dyadic_lags(horizon, 8, 16);
            let decay = metric_decay(model, &[0.0], &lags)?;
            Ok(AnalysisOutcome::Fit {
                fit: fit_holder_exponent(&decay)?,
            })
        }
        AnalysisKind::Simulate => {
            let (paths, method) = simulate_paths_for(config, model, grid)?;
            let file = out_dir.join("paths.csv");
            std::fs::write(&file, paths_to_csv(&paths))?;
            Ok(AnalysisOutcome::Paths {
                n_paths: paths.len(),
                method,
                file: "paths.csv".into(),
            })
        }
        AnalysisKind::Pathstats => {
            let h = config.require_h()?;
            let eps = config.first_eps()?;
            let order = h - eps;
            let (paths, _) = simulate_paths_for(config, model, grid)?;
            let mut constants = Vec::with_capacity(paths.len());
            let mut csv = String::from("path_index,C\n");
            for (i, path) in paths.iter().enumerate() {
                let c = path_holder_constant(path, order)?.constant;
                csv.push_str(&format!("{i},{c:.16e}\n"));
                constants.push(c);
            }
            std::fs::write(out_dir.join("constants.csv"), &csv)?;
            let lags = default_exponent_lags();
            let mut exponents = Vec::new();
            for path in &paths {
                if let Ok(fit) = path_holder_exponent(path, &lags) {
                    exponents.push(fit.exponent);
                }
            }
            let mean_exponent = (!exponents.is_empty())
                .then(|| exponents.iter().sum::<f64>() / exponents.len() as f64);
            // Default exponential-moment probe: a = 0.1, kappa = 1.5, in the
            // regime the moment bound guarantees finite.
            let moment = if constants.len() >= 100 {
                Some(exp_moment_estimate(&constants, 0.1, 1.5)?)
            } else {
                None
            };
            let max_constant = constants.iter().fold(0.0f64, |a, &b| a.max(b));
            Ok(AnalysisOutcome::Pathstats {
                order,
                max_constant,
                mean_exponent,
                moment,
                file: "constants.csv".into(),
            })
        }
    }
}

/// Execute every requested analysis in order, recording failures instead of
/// aborting, and write `report.json` (plus any CSVs) to `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RegularityReport> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let model = config.model.build()?;
    let grid = config.grid.build(model.horizon())?;
    let mut analyses = Vec::with_capacity(config.analyses.len());
    for &kind in &config.analyses {
        let start = Instant::now();
        let outcome = match run_analysis(kind, config, &model, &grid, out_dir) {
            Ok(outcome) => outcome,
            Err(e) => AnalysisOutcome::Error {
                message: e.to_string(),
            },
        };
        analyses.push(AnalysisRecord {
            name: kind.name().to_string(),
            wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
            outcome,
        });
    }
    let report = RegularityReport {
        version: VERSION.to_string(),
        config: config.clone(),
        analyses,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(out_dir.join("report.json"), json + "\n")?;
    Ok(report)
}
