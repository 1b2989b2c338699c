//! Self-similar processes via their canonical kernel `t^(beta-1/2) F(u/t)`:
//! exponent fits through the kernel conditions, plus the profile-level
//! sufficient condition that needs only F itself.

use holderkit::covariance::SelfSimilarProfile;
use holderkit::quad::QuadSettings;
use holderkit::regularity::{
    default_xy_pairs, dyadic_lags, selfsimilar_conditions_check, selfsimilar_sufficient_check,
};

fn main() -> holderkit::Result<()> {
    let grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let lags = dyadic_lags(1.0, 2, 10);
    let quad = QuadSettings::default();

    // F = 1, beta = 1/2 is Brownian motion in disguise.
    let brownian = SelfSimilarProfile::constant(1.0, 0.5)?;
    let (forward, _) = selfsimilar_conditions_check(&brownian, &grid, &lags, &quad)?;
    println!(
        "F = 1, beta = 0.5:     forward exponent {:.4} (2H scale) => H = {:.3}",
        forward.fit.as_ref().unwrap().exponent,
        forward.fit.as_ref().unwrap().exponent / 2.0
    );

    // The power profile x^(beta-H) (1-x)^(H-1/2) saturates the envelope of
    // the sufficient condition with constant c = 1.
    let (beta, hurst) = (0.6, 0.3);
    let power = SelfSimilarProfile::power(beta, hurst)?;
    let verdict = selfsimilar_sufficient_check(&power, hurst, &default_xy_pairs(16))?;
    println!(
        "power profile (beta = {beta}, H = {hurst}): sufficient condition holds = {}, \
         envelope constant c = {:.4}, worst margin = {:.2e}",
        verdict.holds,
        verdict.detail("c").unwrap(),
        verdict.margin
    );
    Ok(())
}
