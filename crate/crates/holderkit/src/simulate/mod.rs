//! Sample-path generation: dense Cholesky for arbitrary models, circulant
//! embedding for stationary-increment models on uniform grids. Both are
//! exact in distribution and bit-reproducible under any thread schedule.

mod circulant;
pub mod rng;

pub use circulant::{fgn_autocovariance, CirculantSampler};
pub use rng::{mix_seed, standard_normals};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::{modulation, CovarianceModel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sampling method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cholesky,
    Circulant,
}

/// Jitter ladder for rank-deficient gram matrices: relative jitter starting
/// at `start_rel`, multiplied by `growth` until `max_rel`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct JitterPolicy {
    pub start_rel: f64,
    pub growth: f64,
    pub max_rel: f64,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        JitterPolicy {
            start_rel: 1e-12,
            growth: 10.0,
            max_rel: 1e-6,
        }
    }
}

/// Generation metadata carried by every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub model: String,
    pub seed: u64,
    pub method: Method,
    pub path_index: u64,
    /// Jitter actually applied to the gram diagonal (Cholesky).
    pub jitter: Option<f64>,
    /// Relative eigenvalue mass clipped to zero (circulant).
    pub clipped_mass: Option<f64>,
}

/// One realization on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: PathMeta,
}

/// Everything needed to generate paths reproducibly.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub model: CovarianceModel,
    pub grid: Vec<f64>,
    pub n_paths: usize,
    pub seed: u64,
    pub method: Method,
    pub jitter_policy: JitterPolicy,
}

impl SimulationPlan {
    pub fn new(model: CovarianceModel, grid: Vec<f64>, n_paths: usize, seed: u64) -> Result<Self> {
        if n_paths == 0 {
            return Err(Error::invalid("n_paths", "must be at least 1"));
        }
        if grid.len() < 1 || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("grid", "must be nonempty and strictly increasing"));
        }
        Ok(SimulationPlan {
            model,
            grid,
            n_paths,
            seed,
            method: Method::Cholesky,
            jitter_policy: JitterPolicy::default(),
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// Cholesky factor of `gram + delta I`, climbing the jitter ladder until the
/// factorization succeeds. Returns the factor and the jitter used.
pub fn cholesky_factor(gram: &Matrix, policy: &JitterPolicy) -> Result<(Matrix, f64)> {
    if !gram.is_square() {
        return Err(Error::invalid("gram", "must be square"));
    }
    let scale = gram.max_diag().max(f64::MIN_POSITIVE);
    let mut delta = 0.0;
    loop {
        if let Some(l) = try_cholesky(gram, delta) {
            return Ok((l, delta));
        }
        delta = if delta == 0.0 {
            policy.start_rel * scale
        } else {
            delta * policy.growth
        };
        if delta > policy.max_rel * scale * (1.0 + 1e-12) {
            return Err(Error::NotPositiveDefinite {
                max_jitter: policy.max_rel * scale,
            });
        }
    }
}

fn try_cholesky(gram: &Matrix, delta: f64) -> Option<Matrix> {
    let n = gram.n_rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = gram.at(i, j) + if i == j { delta } else { 0.0 };
            for k in 0..j {
                sum -= l.at(i, k) * l.at(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.at(j, j));
            }
        }
    }
    Some(l)
}

/// Generate the plan's paths.
///
/// Path `i` draws from the stream seeded by `mix_seed(seed, i)`, so the
/// output is independent of scheduling; generation is parallel across paths.
pub fn sample_paths(plan: &SimulationPlan) -> Result<Vec<SamplePath>> {
    match plan.method {
        Method::Cholesky => cholesky_sample(plan),
        Method::Circulant => circulant_embed_sample(
            &plan.model,
            &plan.grid,
            plan.n_paths,
            plan.seed,
        ),
    }
}

/// The counterexample model's paths are the modulated fBm paths; its gram is
/// ill-conditioned near zero, so the modulation is applied pathwise.
fn modulation_profile(model: &CovarianceModel, grid: &[f64]) -> Option<Vec<f64>> {
    match model {
        CovarianceModel::ModulatedFbm { .. } => Some(
            grid.iter()
                .map(|&t| if t == 0.0 { 0.0 } else { modulation(t) })
                .collect(),
        ),
        _ => None,
    }
}

fn base_model(model: &CovarianceModel) -> Result<CovarianceModel> {
    match model {
        CovarianceModel::ModulatedFbm { hurst, t_max } => CovarianceModel::fbm(*hurst, *t_max),
        other => Ok(other.clone()),
    }
}

fn cholesky_sample(plan: &SimulationPlan) -> Result<Vec<SamplePath>> {
    let base = base_model(&plan.model)?;
    let profile = modulation_profile(&plan.model, &plan.grid);
    // A grid point at t = 0 has zero variance; factor the gram of the
    // positive part and pin X(0) = 0.
    let starts_at_zero = plan.grid[0] == 0.0;
    let active: Vec<f64> = if starts_at_zero {
        plan.grid[1..].to_vec()
    } else {
        plan.grid.clone()
    };
    let (l, jitter) = if active.is_empty() {
        (Matrix::zeros(0, 0), 0.0)
    } else {
        cholesky_factor(&base.gram(&active)?, &plan.jitter_policy)?
    };
    let n = active.len();
    let paths: Vec<SamplePath> = (0..plan.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let z = standard_normals(mix_seed(plan.seed, i), n);
            let x = l.mul_vec(&z);
            let mut values = Vec::with_capacity(plan.grid.len());
            if starts_at_zero {
                values.push(0.0);
            }
            values.extend(x);
            if let Some(f) = &profile {
                for (v, m) in values.iter_mut().zip(f) {
                    *v *= m;
                }
            }
            SamplePath {
                grid: plan.grid.clone(),
                values,
                meta: PathMeta {
                    model: plan.model.kind_name().to_string(),
                    seed: plan.seed,
                    method: Method::Cholesky,
                    path_index: i,
                    jitter: Some(jitter),
                    clipped_mass: None,
                },
            }
        })
        .collect();
    Ok(paths)
}

fn uniform_spacing(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let dt = grid[1] - grid[0];
    let ok = grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
    ok.then_some(dt)
}

/// Exact stationary-increment sampling on a uniform grid via circulant
/// embedding of the increment autocovariance. The grid must be uniform and
/// aligned to the origin (`t_0 / dt` integral); paths are anchored at
/// `X(0) = 0`.
pub fn circulant_embed_sample(
    model: &CovarianceModel,
    grid: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Vec<SamplePath>> {
    let base = base_model(model)?;
    let hurst = match &base {
        CovarianceModel::Fbm { hurst, .. } => *hurst,
        CovarianceModel::Bm { .. } => 0.5,
        _ => {
            return Err(Error::Capability(format!(
                "circulant embedding needs stationary increments; model kind `{}` does not qualify",
                model.kind_name()
            )))
        }
    };
    let dt = uniform_spacing(grid).ok_or_else(|| {
        Error::Capability("circulant embedding requires a uniform grid of >= 2 points".into())
    })?;
    let offset = grid[0] / dt;
    if (offset - offset.round()).abs() > 1e-9 {
        return Err(Error::Capability(
            "circulant embedding requires the grid to align with the origin".into(),
        ));
    }
    let offset = offset.round() as usize;
    let n_inc = offset + grid.len() - 1;
    if n_inc == 0 {
        return Err(Error::Capability(
            "circulant embedding needs at least one increment".into(),
        ));
    }
    let sampler = CirculantSampler::new(&fgn_autocovariance(hurst, n_inc))?;
    let scale = dt.powf(hurst);
    let profile = modulation_profile(model, grid);
    let paths: Vec<SamplePath> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let incs = sampler.sample(mix_seed(seed, i));
            let mut x = 0.0;
            let mut walked = Vec::with_capacity(n_inc + 1);
            walked.push(0.0);
            for inc in &incs {
                x += inc * scale;
                walked.push(x);
            }
            let mut values: Vec<f64> = walked[offset..].to_vec();
            if let Some(f) = &profile {
                for (v, m) in values.iter_mut().zip(f) {
                    *v *= m;
                }
            }
            SamplePath {
                grid: grid.to_vec(),
                values,
                meta: PathMeta {
                    model: model.kind_name().to_string(),
                    seed,
                    method: Method::Circulant,
                    path_index: i,
                    jitter: None,
                    clipped_mass: Some(sampler.clipped_mass),
                },
            }
        })
        .collect();
    Ok(paths)
}

/// Serialize paths as CSV: header `t,p0,p1,...`, one row per grid point,
/// full double precision.
pub fn paths_to_csv(paths: &[SamplePath]) -> String {
    let mut out = String::from("t");
    for i in 0..paths.len() {
        out.push_str(&format!(",p{i}"));
    }
    out.push('\n');
    if let Some(first) = paths.first() {
        for (row, &t) in first.grid.iter().enumerate() {
            out.push_str(&format!("{t:.16e}"));
            for p in paths {
                out.push_str(&format!(",{:.16e}", p.values[row]));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cholesky_identity_no_jitter() {
        let (l, delta) = cholesky_factor(&Matrix::identity(3), &JitterPolicy::default()).unwrap();
        assert_eq!(delta, 0.0);
        assert_eq!(l, Matrix::identity(3));
    }

    #[test]
    fn cholesky_hand_example() {
        let g = Matrix::from_fn(2, 2, |i, j| [[4.0, 2.0], [2.0, 5.0]][i][j]);
        let (l, delta) = cholesky_factor(&g, &JitterPolicy::default()).unwrap();
        assert_eq!(delta, 0.0);
        assert_abs_diff_eq!(l.at(0, 0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l.at(1, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l.at(1, 1), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn cholesky_rank_deficient_needs_jitter() {
        // Eigenvalues {0, 2}: factorization only succeeds with jitter.
        let g = Matrix::from_fn(2, 2, |_, _| 1.0);
        let (l, delta) = cholesky_factor(&g, &JitterPolicy::default()).unwrap();
        assert!(delta > 0.0);
        let rec = l.mul_transpose();
        assert_abs_diff_eq!(rec.at(0, 1), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn cholesky_rejects_negative_definite() {
        let g = Matrix::from_fn(2, 2, |i, j| if i == j { -1.0 } else { 0.0 });
        assert!(matches!(
            cholesky_factor(&g, &JitterPolicy::default()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn plan_rejects_zero_paths() {
        let m = CovarianceModel::bm(1.0).unwrap();
        assert!(SimulationPlan::new(m, vec![0.5, 1.0], 0, 1).is_err());
    }

    #[test]
    fn single_point_bm_variance() {
        let m = CovarianceModel::bm(1.0).unwrap();
        let plan = SimulationPlan::new(m, vec![1.0], 100_000, 7).unwrap();
        let paths = sample_paths(&plan).unwrap();
        let var = paths.iter().map(|p| p.values[0] * p.values[0]).sum::<f64>()
            / paths.len() as f64;
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let m = CovarianceModel::fbm(0.7, 1.0).unwrap();
        let grid: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        let plan = SimulationPlan::new(m, grid, 16, 42).unwrap();
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(|| sample_paths(&plan)).unwrap();
        let b = pool4.install(|| sample_paths(&plan)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circulant_requires_uniform_grid() {
        let m = CovarianceModel::fbm(0.5, 1.0).unwrap();
        let r = circulant_embed_sample(&m, &[0.0, 0.1, 0.5], 1, 1);
        assert!(matches!(r, Err(Error::Capability(_))));
    }

    #[test]
    fn circulant_fbm_terminal_variance() {
        let m = CovarianceModel::fbm(0.7, 1.0).unwrap();
        let grid: Vec<f64> = (0..=256).map(|i| i as f64 / 256.0).collect();
        let paths = circulant_embed_sample(&m, &grid, 10_000, 11).unwrap();
        let var = paths.iter().map(|p| {
            let x = *p.values.last().unwrap();
            x * x
        }).sum::<f64>() / paths.len() as f64;
        // E[X(1)^2] = 1; Var of x^2 is 2 for Gaussian.
        let se = (2.0f64 / 10_000.0).sqrt();
        assert!((var - 1.0).abs() < 3.0 * se, "var {var}");
    }

    #[test]
    fn csv_layout() {
        let p = SamplePath {
            grid: vec![0.0, 1.0],
            values: vec![0.0, 2.5],
            meta: PathMeta {
                model: "bm".into(),
                seed: 1,
                method: Method::Cholesky,
                path_index: 0,
                jitter: None,
                clipped_mass: None,
            },
        };
        let csv = paths_to_csv(&[p]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,p0");
        assert!(lines.next().unwrap().starts_with("0.0000000000000000e0,"));
    }
}
