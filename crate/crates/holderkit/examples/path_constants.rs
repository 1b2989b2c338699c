//! Path-side statistics: empirical Hölder constants C_eps, their
//! exponential moments E[exp(a C^kappa)], and the Garsia-Rodemich-Rumsey
//! functional that bounds every constant pathwise.

use holderkit::covariance::CovarianceModel;
use holderkit::pathstats::{
    default_exponent_lags, exp_moment_estimate, exp_moment_series, grr_constant_estimate,
    path_holder_constant, path_holder_exponent,
};
use holderkit::simulate::circulant_embed_sample;

fn main() -> holderkit::Result<()> {
    let hurst = 0.5;
    let eps = 0.2;
    let model = CovarianceModel::fbm(hurst, 1.0)?;
    let grid: Vec<f64> = (0..=512).map(|i| i as f64 / 512.0).collect();
    let paths = circulant_embed_sample(&model, &grid, 2000, 7)?;

    let constants: Vec<f64> = paths
        .iter()
        .map(|p| path_holder_constant(p, hurst - eps).map(|s| s.constant))
        .collect::<holderkit::Result<_>>()?;
    let mean_c = constants.iter().sum::<f64>() / constants.len() as f64;
    let max_c = constants.iter().fold(0.0f64, |a, &b| a.max(b));
    println!("fBm H={hurst}, order H - eps = {}: {} paths", hurst - eps, paths.len());
    println!("  C_eps mean {mean_c:.3}, max {max_c:.3}");

    let mean_exp: f64 = paths
        .iter()
        .take(64)
        .map(|p| path_holder_exponent(p, &default_exponent_lags()).map(|f| f.exponent))
        .sum::<holderkit::Result<f64>>()?
        / 64.0;
    println!("  mean empirical path exponent {mean_exp:.3} (target {hurst})");

    let est = exp_moment_estimate(&constants, 0.1, 1.5)?;
    println!(
        "  E[exp(0.1 C^1.5)] = {:.4} +- {:.4}, stability {:.2}%",
        est.value,
        est.half_width,
        est.stability * 100.0
    );
    let (sums, verdict) = exp_moment_series(0.1, mean_c, 1.5, 200)?;
    println!(
        "  matching series: verdict {verdict:?}, limit {:.4}",
        sums.last().unwrap()
    );

    let rho = grr_constant_estimate(&paths[..200], hurst, 2.0 * eps)?;
    println!(
        "  GRR ratio rho_max over 200 paths: {:.3} +- {:.3} (every C is <= rho_max T^a xi)",
        rho.value, rho.half_width
    );
    Ok(())
}
