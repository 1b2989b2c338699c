//! Spectral measures of stationary Gaussian processes.
//!
//! The symmetric finite measure of Bochner's representation is stored as a
//! half-line density on `[0, lambda_max]` plus an optional atom at 0; the
//! full-line integral equals twice the half-line cosine integral.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadSettings};

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A finite symmetric spectral measure represented by its half-line density.
#[derive(Clone)]
pub struct SpectralMeasure {
    density: Density,
    lambda_max: f64,
    atom_at_zero: f64,
    /// `int_0^lambda_max density`, computed once at construction.
    truncated_mass: f64,
}

impl SpectralMeasure {
    /// Build a measure, verifying nonnegativity on a sample grid and
    /// finiteness of the truncated mass by quadrature.
    pub fn new(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lambda_max: f64,
        atom_at_zero: f64,
    ) -> Result<Self> {
        if !(lambda_max > 0.0) {
            return Err(Error::invalid("lambda_max", "must be positive"));
        }
        if atom_at_zero < 0.0 {
            return Err(Error::invalid("atom_at_zero", "must be nonnegative"));
        }
        for k in 0..=200 {
            let lam = lambda_max * (k as f64 / 200.0).powi(3);
            let d = density(lam);
            if !d.is_finite() || d < 0.0 {
                return Err(Error::invalid(
                    "density",
                    format!("density({lam}) = {d} is not a finite nonnegative value"),
                ));
            }
        }
        let settings = QuadSettings {
            abs_tol: 1e-12,
            max_depth: 48,
        };
        let truncated_mass = integrate(&density, 0.0, lambda_max, &settings)?;
        if !truncated_mass.is_finite() {
            return Err(Error::invalid("density", "truncated mass is not finite"));
        }
        Ok(SpectralMeasure {
            density: Arc::new(density),
            lambda_max,
            atom_at_zero,
            truncated_mass,
        })
    }

    /// Half-line density of the stationary OU covariance
    /// `r(t) = sigma^2 exp(-rate |t|)`: `sigma^2 rate / (pi (rate^2 + lambda^2))`.
    pub fn ou(sigma: f64, rate: f64, lambda_max: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("sigma", "must be positive"));
        }
        if !(rate > 0.0) {
            return Err(Error::invalid("rate", "must be positive"));
        }
        let s2 = sigma * sigma;
        SpectralMeasure::new(
            move |lam| s2 * rate / (PI * (rate * rate + lam * lam)),
            lambda_max,
            0.0,
        )
    }

    /// A pure point mass at zero frequency (a constant random level).
    pub fn point_mass_at_zero(mass: f64) -> Result<Self> {
        SpectralMeasure::new(|_| 0.0, 1.0, mass)
    }

    pub fn density(&self, lambda: f64) -> f64 {
        (self.density)(lambda)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn atom_at_zero(&self) -> f64 {
        self.atom_at_zero
    }

    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// Upper bound on the mass lost to truncation, assuming the density is
    /// nonincreasing beyond `lambda_max / 2`: `density(lambda_max) * lambda_max`.
    pub fn tail_mass_bound(&self) -> f64 {
        self.density(self.lambda_max) * self.lambda_max
    }

    /// `I(t) = int_0^lambda_max (1 - cos(lambda t)) density(lambda) dlambda`.
    ///
    /// The atom at zero never contributes since `1 - cos(0) = 0`. The
    /// oscillatory part is integrated period by period so large truncation
    /// frequencies stay affordable; the constant part reuses the mass
    /// computed at construction.
    pub fn increment_integral(&self, t: f64, settings: &QuadSettings) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::invalid("t", "must be nonnegative"));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let cos_part = self.cosine_integral(t, settings)?;
        Ok(self.truncated_mass - cos_part)
    }

    /// `int_0^lambda_max cos(lambda t) density(lambda) dlambda` by summation
    /// over whole periods of the cosine.
    fn cosine_integral(&self, t: f64, settings: &QuadSettings) -> Result<f64> {
        let period = 2.0 * PI / t;
        let block = QuadSettings {
            abs_tol: settings.abs_tol / 100.0,
            max_depth: settings.max_depth,
        };
        let stop_below = settings.abs_tol / 10.0;
        let f = |lam: f64| (lam * t).cos() * (self.density)(lam);
        let mut total = 0.0;
        let mut lo = 0.0;
        let mut small_streak = 0;
        while lo < self.lambda_max {
            let hi = (lo + period).min(self.lambda_max);
            let term = integrate(f, lo, hi, &block)?;
            total += term;
            lo = hi;
            if term.abs() < stop_below {
                small_streak += 1;
                if small_streak >= 3 {
                    break;
                }
            } else {
                small_streak = 0;
            }
        }
        Ok(total)
    }
}

impl std::fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralMeasure")
            .field("lambda_max", &self.lambda_max)
            .field("atom_at_zero", &self.atom_at_zero)
            .field("truncated_mass", &self.truncated_mass)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vanishes_at_zero_lag() {
        let m = SpectralMeasure::ou(1.0, 2.0, 1e6).unwrap();
        assert_eq!(m.increment_integral(0.0, &QuadSettings::default()).unwrap(), 0.0);
    }

    #[test]
    fn ou_closed_form() {
        // I(1) = (1 - e^-2) / 2 in the lambda_max -> inf limit.
        let m = SpectralMeasure::ou(1.0, 2.0, 1e9).unwrap();
        let v = m.increment_integral(1.0, &QuadSettings::default()).unwrap();
        let expect = (1.0 - (-2.0f64).exp()) / 2.0;
        assert_abs_diff_eq!(v, expect, epsilon = 1e-8);
    }

    #[test]
    fn point_mass_contributes_nothing() {
        let m = SpectralMeasure::point_mass_at_zero(3.0).unwrap();
        for t in [0.1, 1.0, 7.0] {
            assert_abs_diff_eq!(
                m.increment_integral(t, &QuadSettings::default()).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn negative_density_rejected() {
        assert!(SpectralMeasure::new(|lam| 1.0 - lam, 2.0, 0.0).is_err());
    }

    #[test]
    fn ou_mass_matches_arctan() {
        let m = SpectralMeasure::ou(1.0, 2.0, 100.0).unwrap();
        let expect = (100.0f64 / 2.0).atan() / PI;
        assert_abs_diff_eq!(m.truncated_mass(), expect, epsilon = 1e-10);
    }
}
