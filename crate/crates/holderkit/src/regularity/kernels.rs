//! Condition checkers for Volterra, self-similar and Fredholm
//! representations.

use serde::{Deserialize, Serialize};

use crate::covariance::{SelfSimilarProfile, VolterraKernel};
use crate::error::{Error, Result};
use crate::quad::QuadSettings;
use crate::regularity::{fit_holder_exponent, ConditionVerdict, ExponentFit};

/// Margins within this distance of zero count as satisfied (round-off).
const MARGIN_SLACK: f64 = 1e-12;

/// A sub-condition exponent fit that may be vacuous (all lags vanished).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFit {
    pub fit: Option<ExponentFit>,
    pub dropped_lags: usize,
}

fn max_over_base<F: FnMut(f64, f64) -> Result<f64>>(
    grid: &[f64],
    h: f64,
    mut value: F,
) -> Result<Option<f64>> {
    let max_t = grid.last().copied().unwrap_or(0.0);
    let mut best: Option<f64> = None;
    for &s in grid {
        let t = s + h;
        if t > max_t * (1.0 + 1e-12) {
            continue;
        }
        let v = value(s, t.min(max_t))?;
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    Ok(best)
}

fn fit_decay(decay: Vec<(f64, f64)>) -> ConditionFit {
    let dropped = decay.iter().filter(|(_, v)| !(*v > 0.0)).count();
    match fit_holder_exponent(&decay) {
        Ok(fit) => ConditionFit { fit: Some(fit), dropped_lags: dropped },
        Err(_) => ConditionFit { fit: None, dropped_lags: dropped },
    }
}

/// Exponent fits of the two Volterra conditions
/// `int_s^t K(t,u)^2 du` and `int_0^s (K(t,u) - K(s,u))^2 du`
/// as functions of the lag `t - s`, maximized over base points.
///
/// Exponents are reported in the 2H scale of the right-hand sides; halve
/// them for the Holder index.
pub fn volterra_conditions_check(
    kernel: &VolterraKernel,
    grid: &[f64],
    lags: &[f64],
    quad: &QuadSettings,
) -> Result<(ConditionFit, ConditionFit)> {
    if grid.len() < 2 {
        return Err(Error::InsufficientData("grid needs at least 2 points".into()));
    }
    let mut forward = Vec::with_capacity(lags.len());
    let mut increment = Vec::with_capacity(lags.len());
    for &h in lags {
        if !(h > 0.0) {
            return Err(Error::invalid("lag", format!("h = {h} must be positive")));
        }
        if let Some(v) = max_over_base(grid, h, |s, t| kernel.forward_square_integral(s, t, quad))? {
            forward.push((h, v));
        }
        if let Some(v) =
            max_over_base(grid, h, |s, t| kernel.increment_square_integral(s, t, quad))?
        {
            increment.push((h, v));
        }
    }
    Ok((fit_decay(forward), fit_decay(increment)))
}

/// Same exponent fits for a self-similar canonical profile, through its
/// kernel `t^(beta - 1/2) F(u/t)`.
pub fn selfsimilar_conditions_check(
    profile: &SelfSimilarProfile,
    grid: &[f64],
    lags: &[f64],
    quad: &QuadSettings,
) -> Result<(ConditionFit, ConditionFit)> {
    volterra_conditions_check(&profile.kernel(), grid, lags, quad)
}

fn rel_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale <= 1e-300 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// The Alos-type sufficient condition: minimal constants for
/// `int_s^t K(t,u)^2 du <= c1 (t-s)^2H` and
/// `|dK/dt (t,s)| <= c2 (t-s)^(H - 3/2)`,
/// declared to hold when both are finite and stable under dropping every
/// other grid point (relative change below 5%).
pub fn alos_check(
    kernel: &VolterraKernel,
    holder_h: f64,
    grid: &[f64],
    quad: &QuadSettings,
) -> Result<ConditionVerdict> {
    if !kernel.has_derivative() {
        return Err(Error::Capability(
            "alos check requires a kernel with dK/dt".into(),
        ));
    }
    if grid.len() < 4 {
        return Err(Error::InsufficientData("grid needs at least 4 points".into()));
    }
    let constants = |pts: &[f64]| -> Result<(f64, f64)> {
        let mut c1 = 0.0f64;
        let mut c2 = 0.0f64;
        for (i, &s) in pts.iter().enumerate() {
            for &t in &pts[i + 1..] {
                let h = t - s;
                let v = kernel.forward_square_integral(s, t, quad)?;
                c1 = c1.max(v / h.powf(2.0 * holder_h));
                let d = kernel.eval_dt(t, s).unwrap().abs();
                c2 = c2.max(d * h.powf(1.5 - holder_h));
            }
        }
        Ok((c1, c2))
    };
    let (c1, c2) = constants(grid)?;
    let coarse: Vec<f64> = grid.iter().copied().step_by(2).collect();
    let (c1c, c2c) = constants(&coarse)?;
    let stability = rel_change(c1, c1c).max(rel_change(c2, c2c));
    let finite = c1.is_finite() && c2.is_finite();
    let margin = if finite { 0.05 - stability } else { f64::NEG_INFINITY };
    Ok(ConditionVerdict {
        name: "alos-sufficient".into(),
        holds: margin >= 0.0,
        margin,
        witness: None,
        details: vec![
            ("c1".into(), c1),
            ("c2".into(), c2),
            ("stability".into(), stability),
        ],
    })
}

/// Sufficient condition on the profile itself:
/// (1) minimal `c` with `F(x) <= c x^(beta-H) (1-x)^(H-1/2)` over the x grid;
/// (2) `|1 - F(x)/F(y)| <= |(y/x)^(H-beta) ((1-x)/(1-y))^(H-1/2) - 1|`
/// over pairs `0 < y < x < 1`, as a worst-case margin.
pub fn selfsimilar_sufficient_check(
    profile: &SelfSimilarProfile,
    holder_h: f64,
    xy_pairs: &[(f64, f64)],
) -> Result<ConditionVerdict> {
    if xy_pairs.is_empty() {
        return Err(Error::InsufficientData("no (x, y) pairs given".into()));
    }
    for &(x, y) in xy_pairs {
        if !(0.0 < y && y < x && x < 1.0) {
            return Err(Error::invalid(
                "xy_pairs",
                format!("pair ({x}, {y}) must satisfy 0 < y < x < 1"),
            ));
        }
    }
    let beta = profile.beta();
    let envelope = |x: f64| x.powf(beta - holder_h) * (1.0 - x).powf(holder_h - 0.5);
    let mut c = 0.0f64;
    for &(x, y) in xy_pairs {
        c = c.max(profile.eval(x) / envelope(x));
        c = c.max(profile.eval(y) / envelope(y));
    }
    let mut margin = f64::INFINITY;
    let mut witness = xy_pairs[0];
    for &(x, y) in xy_pairs {
        let lhs = (1.0 - profile.eval(x) / profile.eval(y)).abs();
        let rhs = ((y / x).powf(holder_h - beta)
            * ((1.0 - x) / (1.0 - y)).powf(holder_h - 0.5)
            - 1.0)
            .abs();
        let m = rhs - lhs;
        if m < margin {
            margin = m;
            witness = (x, y);
        }
    }
    let holds = c.is_finite() && margin >= -MARGIN_SLACK;
    let reported = if holds { margin.max(0.0) } else { margin };
    Ok(ConditionVerdict {
        name: "selfsimilar-sufficient".into(),
        holds,
        margin: reported,
        witness: Some(witness),
        details: vec![("c".into(), c), ("raw_margin".into(), margin)],
    })
}

/// Default `(x, y)` pair grid for [`selfsimilar_sufficient_check`].
pub fn default_xy_pairs(n: usize) -> Vec<(f64, f64)> {
    let mut pairs = Vec::new();
    for i in 1..n {
        for j in 1..i {
            let x = i as f64 / n as f64;
            let y = j as f64 / n as f64;
            pairs.push((x, y));
        }
    }
    pairs
}

/// Dominating-function check for a Fredholm kernel: worst-case margin of
/// `f(u) |t-s|^(H-eps) - |K(t,u) - K(s,u)|` over grid pairs `(t, s)` and the
/// tabulated `u` samples of `f`.
pub fn fredholm_dominating_check(
    kernel: impl Fn(f64, f64) -> f64,
    f_samples: &[(f64, f64)],
    holder_h: f64,
    eps: f64,
    grid: &[f64],
) -> Result<ConditionVerdict> {
    if eps <= 0.0 || eps >= holder_h {
        return Err(Error::invalid(
            "eps",
            format!("eps = {eps} must lie in (0, H) with H = {holder_h}"),
        ));
    }
    if f_samples.len() < 2 || grid.len() < 2 {
        return Err(Error::InsufficientData(
            "need >= 2 f samples and >= 2 grid points".into(),
        ));
    }
    // Trapezoidal L2 mass of f on its sample grid; finite samples make this
    // a reported diagnostic rather than a hard gate.
    let mut l2 = 0.0;
    for w in f_samples.windows(2) {
        let (u0, f0) = w[0];
        let (u1, f1) = w[1];
        l2 += 0.5 * (f0 * f0 + f1 * f1) * (u1 - u0).abs();
    }
    let mut margin = f64::INFINITY;
    let mut witness = (grid[0], grid[0]);
    for (i, &s) in grid.iter().enumerate() {
        for &t in &grid[i + 1..] {
            let bound_factor = (t - s).abs().powf(holder_h - eps);
            for &(u, fu) in f_samples {
                let m = fu * bound_factor - (kernel(t, u) - kernel(s, u)).abs();
                if m < margin {
                    margin = m;
                    witness = (t, s);
                }
            }
        }
    }
    let holds = margin >= -MARGIN_SLACK;
    Ok(ConditionVerdict {
        name: "fredholm-dominating".into(),
        holds,
        margin: if holds { margin.max(0.0) } else { margin },
        witness: Some(witness),
        details: vec![("f_l2_mass".into(), l2), ("raw_margin".into(), margin)],
    })
}
