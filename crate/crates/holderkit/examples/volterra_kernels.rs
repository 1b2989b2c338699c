//! Hölder regularity from a Volterra representation `X_t = int K(t,u) dW_u`:
//! the forward square integral `int_s^t K(t,u)^2 du` and the increment
//! square integral `int_0^s (K(t,u)-K(s,u))^2 du` both decay like
//! `(t-s)^2H`, and their fitted exponents identify H.

use holderkit::covariance::VolterraKernel;
use holderkit::quad::QuadSettings;
use holderkit::regularity::{alos_check, dyadic_lags, volterra_conditions_check};

fn main() -> holderkit::Result<()> {
    let grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let lags = dyadic_lags(1.0, 2, 10);
    let quad = QuadSettings::default();

    println!("kernel                      forward 2H   increment 2H   => H");
    for (name, kernel) in [
        ("indicator (Brownian)     ", VolterraKernel::indicator()),
        ("Riemann-Liouville H=0.25 ", VolterraKernel::riemann_liouville(0.25)?),
        ("Riemann-Liouville H=0.75 ", VolterraKernel::riemann_liouville(0.75)?),
    ] {
        let (forward, increment) = volterra_conditions_check(&kernel, &grid, &lags, &quad)?;
        let f = forward.fit.as_ref().map(|f| f.exponent);
        let i = increment.fit.as_ref().map(|f| f.exponent);
        let h = f.map(|e| e / 2.0);
        println!(
            "{name}  {:>10}   {:>12}   {:>5}",
            f.map_or("-".into(), |e| format!("{e:.4}")),
            i.map_or("vacuous".into(), |e| format!("{e:.4}")),
            h.map_or("-".into(), |e| format!("{e:.3}")),
        );
    }

    // The derivative-based sufficient condition for a kernel with dK/dt.
    let rl = VolterraKernel::riemann_liouville(0.25)?;
    let verdict = alos_check(&rl, 0.25, &grid, &quad)?;
    println!(
        "\nderivative condition at H=0.25: holds = {}, c1 = {:.4}, c2 = {:.4}",
        verdict.holds,
        verdict.detail("c1").unwrap(),
        verdict.detail("c2").unwrap()
    );
    Ok(())
}
