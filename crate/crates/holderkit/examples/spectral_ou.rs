//! Stationary models through their spectral measure: the increment metric
//! is `d^2(h) = 4 int (1 - cos(lambda h)) density(lambda) dlambda`, checked
//! here against the Ornstein-Uhlenbeck closed form.

use holderkit::covariance::SpectralMeasure;
use holderkit::quad::QuadSettings;
use holderkit::regularity::{dyadic_lags, fit_holder_exponent};

fn main() -> holderkit::Result<()> {
    // OU with rate 2: r(t) = e^(-2|t|), density 2 / (pi (4 + lambda^2)).
    let measure = SpectralMeasure::ou(1.0, 2.0, 1e9)?;
    let quad = QuadSettings::with_tol(1e-12);

    let i1 = measure.increment_integral(1.0, &quad)?;
    let closed = (1.0 - (-2.0f64).exp()) / 2.0;
    println!("I(1) quadrature {i1:.12}");
    println!("I(1) closed     {closed:.12}   (|error| = {:.1e})", (i1 - closed).abs());

    // Small-lag decay of d(h) = 2 sqrt(I(h)) identifies the Hölder index.
    let decay: Vec<(f64, f64)> = dyadic_lags(1.0, 12, 20)
        .iter()
        .map(|&h| measure.increment_integral(h, &quad).map(|i| (h, 2.0 * i.sqrt())))
        .collect::<holderkit::Result<_>>()?;
    let fit = fit_holder_exponent(&decay)?;
    println!(
        "\nsmall-lag metric exponent: {:.5}  (OU paths are Hölder of any order < 1/2)",
        fit.exponent
    );
    println!(
        "truncation diagnostics: mass below cutoff {:.6}, tail bound {:.1e}",
        measure.truncated_mass(),
        measure.tail_mass_bound()
    );
    Ok(())
}
