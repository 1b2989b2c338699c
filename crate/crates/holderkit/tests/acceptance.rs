//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.
//!
//! Runtime budgets are asserted only in release builds; debug builds check
//! correctness only.

use std::time::Instant;

use holderkit::covariance::{CovarianceModel, SelfSimilarProfile, SpectralMeasure, VolterraKernel};
use holderkit::pathstats::{
    default_exponent_lags, exp_moment_estimate, exp_moment_series, gaussian_abs_moment,
    grr_constant_estimate, grr_xi, lemma1_bound, path_holder_constant, path_holder_exponent,
    SeriesVerdict,
};
use holderkit::quad::QuadSettings;
use holderkit::regularity::{
    divergence_scan, dyadic_lags, dyadic_refinement_grids, fit_holder_exponent, metric_decay,
    selfsimilar_conditions_check, stationary_increment_check, volterra_conditions_check,
};
use holderkit::simulate::{
    circulant_embed_sample, cholesky_factor, sample_paths, standard_normals, JitterPolicy, Method,
    PathMeta, SamplePath, SimulationPlan,
};

fn uniform_grid(n_points: usize, horizon: f64) -> Vec<f64> {
    (0..n_points)
        .map(|i| horizon * i as f64 / (n_points - 1) as f64)
        .collect()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {criterion}: {status} ({detail})");
    assert!(pass, "{criterion}: {detail}");
}

fn check_runtime(criterion: &str, start: Instant, limit_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    if !cfg!(debug_assertions) {
        assert!(
            elapsed < limit_s,
            "{criterion}: runtime {elapsed:.1}s exceeds {limit_s}s"
        );
    }
}

fn synthetic_path(grid: Vec<f64>, values: Vec<f64>) -> SamplePath {
    SamplePath {
        grid,
        values,
        meta: PathMeta {
            model: "synthetic".into(),
            seed: 0,
            method: Method::Cholesky,
            path_index: 0,
            jitter: None,
            clipped_mass: None,
        },
    }
}

/// Criterion 1: metric-side exponent recovery for fBm.
#[test]
fn criterion_1_exponent_recovery() {
    let mut detail = String::new();
    let mut pass = true;
    for hurst in [0.3, 0.5, 0.7] {
        let start = Instant::now();
        let model = CovarianceModel::fbm(hurst, 1.0).unwrap();
        let lags = dyadic_lags(1.0, 4, 16);
        // fBm increments are stationary: base point 0 gives the exact
        // modulus without the catastrophic cancellation of bases near 1.
        let decay = metric_decay(&model, &[0.0], &lags).unwrap();
        let fit = fit_holder_exponent(&decay).unwrap();
        check_runtime("criterion 1", start, 1.0);
        pass &= (fit.exponent - hurst).abs() < 1e-6 && fit.max_residual < 1e-10;
        detail.push_str(&format!(
            "H={hurst}: fit {:.8}, residual {:.2e}; ",
            fit.exponent, fit.max_residual
        ));
    }
    report("criterion 1 (exponent recovery)", pass, detail.trim_end());
}

/// Criterion 2: mean pathwise exponent of simulated fBm matches H.
#[test]
fn criterion_2_path_side_consistency() {
    let start = Instant::now();
    let grid = uniform_grid(4096, 1.0);
    let lags = default_exponent_lags();
    let mut detail = String::new();
    let mut pass = true;
    for hurst in [0.3, 0.5, 0.7] {
        let model = CovarianceModel::fbm(hurst, 1.0).unwrap();
        let paths = circulant_embed_sample(&model, &grid, 64, 20_000 + (hurst * 10.0) as u64)
            .unwrap();
        let mean: f64 = paths
            .iter()
            .map(|p| path_holder_exponent(p, &lags).unwrap().exponent)
            .sum::<f64>()
            / paths.len() as f64;
        pass &= (mean - hurst).abs() < 0.05;
        detail.push_str(&format!("H={hurst}: mean exponent {mean:.4}; "));
    }
    check_runtime("criterion 2", start, 30.0);
    report("criterion 2 (path-side consistency)", pass, detail.trim_end());
}

/// Criterion 3: the epsilon-gap counterexample diverges at eps = 0 and
/// stabilizes at eps = 0.05.
#[test]
fn criterion_3_epsilon_gap() {
    let start = Instant::now();
    let model = CovarianceModel::modulated_fbm(0.5, 0.3).unwrap();
    let grids = dyadic_refinement_grids(0.3, &[6, 8, 10, 12, 14, 16, 18, 20]);
    let c0 = divergence_scan(&model, 0.5, 0.0, &grids).unwrap();
    let nondecreasing = c0.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let growth = c0.last().unwrap() / c0.first().unwrap() - 1.0;
    let c_eps = divergence_scan(&model, 0.5, 0.05, &grids).unwrap();
    let tail_change =
        (c_eps[c_eps.len() - 1] - c_eps[c_eps.len() - 2]).abs() / c_eps[c_eps.len() - 1];
    check_runtime("criterion 3", start, 10.0);
    let pass = nondecreasing && growth >= 0.10 && tail_change < 0.05;
    report(
        "criterion 3 (epsilon-gap counterexample)",
        pass,
        &format!(
            "eps=0 growth {:.1}% nondecreasing={nondecreasing}, eps=0.05 tail change {:.2}%",
            growth * 100.0,
            tail_change * 100.0
        ),
    );
}

/// Criterion 4: GRR functional closed form and batch stability of rho_max.
#[test]
fn criterion_4_grr_functional() {
    let start = Instant::now();
    let grid = uniform_grid(1024, 1.0);
    let linear = synthetic_path(grid.clone(), grid.clone());
    let xi = grr_xi(&linear, 0.5, 0.5).unwrap();
    let exact = (1.0f64 / 6.0).powf(0.25);
    let xi_ok = (xi - exact).abs() / exact < 0.02;

    let model = CovarianceModel::fbm(0.5, 1.0).unwrap();
    let batch_grid = uniform_grid(257, 1.0);
    let rho = |seed: u64| {
        let paths = circulant_embed_sample(&model, &batch_grid, 50, seed).unwrap();
        grr_constant_estimate(&paths, 0.5, 0.25).unwrap().value
    };
    let (r1, r2) = (rho(1000), rho(2000));
    let batch_diff = (r1 - r2).abs() / r1.max(r2);
    check_runtime("criterion 4", start, 60.0);
    let pass = xi_ok && batch_diff < 0.30;
    report(
        "criterion 4 (GRR functional)",
        pass,
        &format!(
            "xi {xi:.4} vs {exact:.4}, rho_max batches {r1:.3}/{r2:.3} diff {:.1}%",
            batch_diff * 100.0
        ),
    );
}

/// Criterion 5: exponential-moment estimate stability and series verdicts.
#[test]
fn criterion_5_exponential_moments() {
    let start = Instant::now();
    let model = CovarianceModel::fbm(0.5, 1.0).unwrap();
    let grid = uniform_grid(513, 1.0);
    let paths = circulant_embed_sample(&model, &grid, 4000, 9).unwrap();
    let constants: Vec<f64> = paths
        .iter()
        .map(|p| path_holder_constant(p, 0.3).unwrap().constant)
        .collect();
    let est = exp_moment_estimate(&constants, 0.1, 1.5).unwrap();
    let stable = est.stability < 0.05 && est.overflow_count == 0;

    let (_, v1) = exp_moment_series(0.1, 1.0, 1.5, 200).unwrap();
    let (_, v2) = exp_moment_series(10.0, 1.0, 2.0, 200).unwrap();
    check_runtime("criterion 5", start, 120.0);
    let pass = stable && v1 == SeriesVerdict::Converged && v2 == SeriesVerdict::Diverged;
    report(
        "criterion 5 (exponential moments)",
        pass,
        &format!(
            "estimate {:.4} stability {:.2}%, series verdicts {v1:?}/{v2:?}",
            est.value,
            est.stability * 100.0
        ),
    );
}

/// Criterion 6: Gaussian absolute-moment formula against seeded Monte Carlo.
#[test]
fn criterion_6_gaussian_moments() {
    let start = Instant::now();
    let n = 100_000usize;
    let z = standard_normals(777, n);
    let mut detail = String::new();
    let mut pass = true;
    for q in [1.0, 2.0, 3.0, 4.0] {
        let emp = z.iter().map(|x| x.abs().powf(q)).sum::<f64>() / n as f64;
        let exact = gaussian_abs_moment(1.0, q).unwrap();
        let second = gaussian_abs_moment(1.0, 2.0 * q).unwrap();
        let se = ((second - exact * exact) / n as f64).sqrt();
        pass &= (emp - exact).abs() < 3.0 * se;
        detail.push_str(&format!("q={q}: {emp:.4} vs {exact:.4} (se {se:.1e}); "));
    }
    check_runtime("criterion 6", start, 5.0);
    report("criterion 6 (Gaussian moment formula)", pass, detail.trim_end());
}

/// Criterion 7: the kernel, stationary-increment and spectral routes all
/// recover Holder index 1/2 for Brownian-type models.
#[test]
fn criterion_7_corollary_coherence() {
    let start = Instant::now();
    let quad = QuadSettings::default();
    let grid = uniform_grid(17, 1.0);
    let lags = dyadic_lags(1.0, 2, 10);

    let (forward, _) =
        volterra_conditions_check(&VolterraKernel::indicator(), &grid, &lags, &quad).unwrap();
    let h_volterra = forward.fit.unwrap().exponent / 2.0;

    let profile = SelfSimilarProfile::constant(1.0, 0.5).unwrap();
    let (forward, _) = selfsimilar_conditions_check(&profile, &grid, &lags, &quad).unwrap();
    let h_selfsim = forward.fit.unwrap().exponent / 2.0;

    let bm = CovarianceModel::bm(1.0).unwrap();
    let h_stationary =
        stationary_increment_check(&bm, &dyadic_lags(1.0, 2, 16)).unwrap().exponent / 2.0;

    let measure = SpectralMeasure::ou(1.0, 2.0, 1e9).unwrap();
    let tight = QuadSettings::with_tol(1e-12);
    let closed_form = (1.0 - (-2.0f64).exp()) / 2.0;
    let quad_err = (measure.increment_integral(1.0, &tight).unwrap() - closed_form).abs();
    let decay: Vec<(f64, f64)> = dyadic_lags(1.0, 12, 20)
        .iter()
        .map(|&h| {
            let i = measure.increment_integral(h, &tight).unwrap();
            (h, 2.0 * i.sqrt())
        })
        .collect();
    let h_spectral = fit_holder_exponent(&decay).unwrap().exponent;

    check_runtime("criterion 7", start, 30.0);
    let pass = (h_volterra - 0.5).abs() < 1e-3
        && (h_selfsim - 0.5).abs() < 1e-3
        && (h_stationary - 0.5).abs() < 1e-3
        && (h_spectral - 0.5).abs() < 1e-3
        && quad_err < 1e-8;
    report(
        "criterion 7 (corollary coherence)",
        pass,
        &format!(
            "H volterra {h_volterra:.5}, selfsimilar {h_selfsim:.5}, stationary {h_stationary:.5}, \
             spectral {h_spectral:.5}, OU quadrature error {quad_err:.1e}"
        ),
    );
}

/// Criterion 8: sampler correctness - factor reconstruction, empirical
/// covariances, and bit-reproducibility across thread counts.
#[test]
fn criterion_8_sampling_correctness() {
    let start = Instant::now();
    let model = CovarianceModel::fbm(0.7, 1.0).unwrap();

    // Cholesky reconstruction at n = 512 (grid excludes the degenerate 0).
    let grid512: Vec<f64> = (1..=512).map(|i| i as f64 / 512.0).collect();
    let gram = model.gram(&grid512).unwrap();
    let (l, _) = cholesky_factor(&gram, &JitterPolicy::default()).unwrap();
    let rec = l.mul_transpose();
    let mut max_err = 0.0f64;
    for i in 0..512 {
        for j in 0..512 {
            max_err = max_err.max((rec.at(i, j) - gram.at(i, j)).abs());
        }
    }
    let rel_err = max_err / gram.max_abs();
    let reconstruction_ok = rel_err <= 1e-10;

    // Empirical covariances from both samplers vs the target.
    let grid = uniform_grid(65, 1.0);
    let n_paths = 10_000usize;
    let plan = SimulationPlan::new(model.clone(), grid.clone(), n_paths, 31).unwrap();
    let chol_paths = sample_paths(&plan).unwrap();
    let circ_paths = circulant_embed_sample(&model, &grid, n_paths, 32).unwrap();
    let probes = [8usize, 16, 32, 48, 64];
    let mut cov_ok = true;
    for paths in [&chol_paths, &circ_paths] {
        for &i in &probes {
            for &j in &probes {
                let target = model.cov(grid[i], grid[j]).unwrap();
                let est = paths
                    .iter()
                    .map(|p| p.values[i] * p.values[j])
                    .sum::<f64>()
                    / n_paths as f64;
                let vi = model.variance(grid[i]).unwrap();
                let vj = model.variance(grid[j]).unwrap();
                let se = ((vi * vj + target * target) / n_paths as f64).sqrt();
                cov_ok &= (est - target).abs() < 5.0 * se;
            }
        }
    }

    // Bit-identical output for 1 vs 4 worker threads.
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let small_plan = SimulationPlan::new(model.clone(), grid.clone(), 64, 5).unwrap();
    let a = pool1.install(|| sample_paths(&small_plan)).unwrap();
    let b = pool4.install(|| sample_paths(&small_plan)).unwrap();
    let c = pool1.install(|| circulant_embed_sample(&model, &grid, 64, 5)).unwrap();
    let d = pool4.install(|| circulant_embed_sample(&model, &grid, 64, 5)).unwrap();
    let deterministic = a == b && c == d;

    check_runtime("criterion 8", start, 120.0);
    let pass = reconstruction_ok && cov_ok && deterministic;
    report(
        "criterion 8 (sampling correctness)",
        pass,
        &format!(
            "reconstruction rel err {rel_err:.1e}, covariances within 5 se: {cov_ok}, \
             thread-count determinism: {deterministic}"
        ),
    );
}

/// Criterion 9: the small-ball variance bound holds empirically for the
/// normalized fBm increment family.
#[test]
fn criterion_9_lemma1_bound() {
    let start = Instant::now();
    let hurst = 0.5;
    let eps = 0.25;
    let model = CovarianceModel::fbm(hurst, 1.0).unwrap();
    let grid = uniform_grid(65, 1.0);
    let n_sims = 10_000usize;
    let plan = SimulationPlan::new(model.clone(), grid.clone(), n_sims, 55).unwrap();
    let paths = sample_paths(&plan).unwrap();

    // Normalizers and exact variances of xi_(t,s) = (X_t - X_s)/|t-s|^(H-eps).
    let mut pairs = Vec::new();
    let mut max_var = 0.0f64;
    for i in 0..grid.len() {
        for j in 0..i {
            let denom = (grid[i] - grid[j]).powf(hurst - eps);
            let d = model.increment_stddev(grid[j], grid[i]).unwrap();
            max_var = max_var.max((d / denom).powi(2));
            pairs.push((i, j, denom));
        }
    }
    let sups: Vec<f64> = paths
        .iter()
        .map(|p| {
            pairs
                .iter()
                .map(|&(i, j, denom)| (p.values[i] - p.values[j]).abs() / denom)
                .fold(0.0f64, f64::max)
        })
        .collect();

    let mut pass = true;
    let mut detail = format!("max var {max_var:.3}; ");
    for x in [1.0, 2.0, 4.0] {
        let p_hat = sups.iter().filter(|&&s| s < x).count() as f64 / n_sims as f64;
        let se = (p_hat * (1.0 - p_hat) / n_sims as f64).sqrt();
        // Slack: evaluate the bound at the lower confidence edge of P-hat,
        // which can only enlarge it; floor at 1/(2 n) when P-hat is 0.
        let p_low = (p_hat - 3.0 * se).max(0.5 / n_sims as f64);
        let bound = lemma1_bound(x, p_low).unwrap();
        pass &= max_var <= bound;
        detail.push_str(&format!("x={x}: P {p_hat:.3}, bound {bound:.3}; "));
    }
    check_runtime("criterion 9", start, 60.0);
    report("criterion 9 (small-ball bound)", pass, detail.trim_end());
}
