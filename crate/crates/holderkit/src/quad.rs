//! Adaptive composite quadrature with interval bisection.
//!
//! The kernel and spectral integrals have no prescribed scheme, so we use
//! adaptive Simpson with a power-law substitution for integrable endpoint
//! singularities of the form (b - u)^alpha, alpha in (-1, 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings for adaptive quadrature.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct QuadSettings {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Maximum bisection depth.
    pub max_depth: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            abs_tol: 1e-9,
            max_depth: 40,
        }
    }
}

impl QuadSettings {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadSettings {
            abs_tol,
            ..Default::default()
        }
    }
}

// Non-finite samples (isolated endpoint singularities) are treated as 0;
// the surrounding panels are refined until the estimate settles.
fn sample(f: &impl Fn(f64) -> f64, x: f64) -> f64 {
    let y = f(x);
    if y.is_finite() {
        y
    } else {
        0.0
    }
}

struct Adaptive<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    max_depth: u32,
    /// Error left over on panels where the depth limit was hit.
    residual: f64,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn simpson(&self, a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn recurse(
        &mut self,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = sample(self.f, lm);
        let frm = sample(self.f, rm);
        let left = self.simpson(a, fa, m, fm, flm);
        let right = self.simpson(m, fm, b, fb, frm);
        let err = (left + right - whole) / 15.0;
        if err.abs() <= tol || (b - a) < f64::EPSILON * (a.abs() + b.abs()) {
            return left + right + err;
        }
        if depth >= self.max_depth {
            self.residual += err.abs();
            return left + right + err;
        }
        self.recurse(a, fa, m, fm, flm, left, 0.5 * tol, depth + 1)
            + self.recurse(m, fm, b, fb, frm, right, 0.5 * tol, depth + 1)
    }
}

/// Integrate `f` over `[a, b]` to the requested absolute tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, settings: &QuadSettings) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = sample(&f, lo);
    let fb = sample(&f, hi);
    let m = 0.5 * (lo + hi);
    let fm = sample(&f, m);
    let mut state = Adaptive {
        f: &f,
        max_depth: settings.max_depth,
        residual: 0.0,
    };
    let whole = state.simpson(lo, fa, hi, fb, fm);
    let value = state.recurse(lo, fa, hi, fb, fm, whole, settings.abs_tol, 0);
    if state.residual > settings.abs_tol {
        return Err(Error::QuadratureNonConvergence {
            err: state.residual,
            tol: settings.abs_tol,
        });
    }
    Ok(sign * value)
}

/// Integrate `f` over `[a, b]` where `f(u) ~ (b - u)^alpha` as `u -> b`,
/// with `alpha > -1` so the integral exists.
///
/// Changes variables to `w = (b - u)^(1 + alpha)`, which makes the
/// transformed integrand bounded near the singular endpoint.
pub fn integrate_singular_upper(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    alpha: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if alpha >= 0.0 {
        return integrate(f, a, b, settings);
    }
    if alpha <= -1.0 {
        return Err(Error::invalid(
            "alpha",
            format!("singularity exponent {alpha} is not integrable"),
        ));
    }
    let q = 1.0 + alpha;
    let w_max = (b - a).powf(q);
    let g = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        let d = w.powf(1.0 / q);
        let u = b - d;
        f(u) * d / (q * w)
    };
    integrate(g, 0.0, w_max, settings)
}
