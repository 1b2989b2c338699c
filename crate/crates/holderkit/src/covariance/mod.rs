//! Covariance models of centered Gaussian processes on `[0, T]` and the
//! quantities derived from them: the increment metric `d_X`, gram matrices,
//! kernel-induced covariances and spectral increment integrals.

mod spectral;
mod volterra;

pub use spectral::SpectralMeasure;
pub use volterra::{SelfSimilarProfile, TabulatedKernel, VolterraKernel};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quad::QuadSettings;

/// Relative round-off tolerance when clamping negative increment variances.
const RADICAND_CLAMP_REL: f64 = 1e-12;

/// A covariance family `R(s, t)` on `[0, T]`.
///
/// Models are immutable after construction and cheap to clone; evaluation is
/// pure, so a model may be shared freely across threads.
#[derive(Clone)]
pub enum CovarianceModel {
    /// Fractional Brownian motion, `R(s,t) = (s^2H + t^2H - |t-s|^2H) / 2`.
    Fbm { hurst: f64, horizon: f64 },
    /// Standard Brownian motion, `R(s,t) = min(s,t)`.
    Bm { horizon: f64 },
    /// Stationary Ornstein-Uhlenbeck, `R(s,t) = sigma^2 exp(-rate |t-s|)`.
    Ou { sigma: f64, rate: f64, horizon: f64 },
    /// Stationary model given by a spectral measure via Bochner's formula.
    Spectral {
        measure: SpectralMeasure,
        horizon: f64,
        quad: QuadSettings,
    },
    /// Volterra process `X_t = int_0^t K(t,u) dW_u`.
    Volterra {
        kernel: VolterraKernel,
        horizon: f64,
        quad: QuadSettings,
    },
    /// Purely non-deterministic self-similar process with canonical kernel
    /// `t^(beta - 1/2) F(u/t)`.
    SelfSimilar {
        profile: SelfSimilarProfile,
        horizon: f64,
        quad: QuadSettings,
    },
    /// The epsilon-gap counterexample `X_t = f(t) B^H_t` with
    /// `f(t) = sqrt(log log 1/t)`, defined for `t <= t_max < 1/e`.
    ModulatedFbm { hurst: f64, t_max: f64 },
}

fn check_hurst(h: f64) -> Result<()> {
    if h <= 0.0 || h >= 1.0 {
        return Err(Error::invalid("hurst", format!("H = {h} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::invalid("horizon", format!("T = {t} must be positive")));
    }
    Ok(())
}

/// Modulation of the counterexample model. Diverges as `t -> 0`, but the
/// product `f(t) t^H` still vanishes, so `X_0 = 0` by continuity.
pub fn modulation(t: f64) -> f64 {
    (1.0 / t).ln().ln().sqrt()
}

fn fbm_cov(h: f64, s: f64, t: f64) -> f64 {
    0.5 * (s.powf(2.0 * h) + t.powf(2.0 * h) - (t - s).abs().powf(2.0 * h))
}

impl CovarianceModel {
    pub fn fbm(hurst: f64, horizon: f64) -> Result<Self> {
        check_hurst(hurst)?;
        check_horizon(horizon)?;
        Ok(CovarianceModel::Fbm { hurst, horizon })
    }

    pub fn bm(horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(CovarianceModel::Bm { horizon })
    }

    pub fn ou(sigma: f64, rate: f64, horizon: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("sigma", "must be positive"));
        }
        if !(rate > 0.0) {
            return Err(Error::invalid("rate", "must be positive"));
        }
        check_horizon(horizon)?;
        Ok(CovarianceModel::Ou { sigma, rate, horizon })
    }

    pub fn spectral(measure: SpectralMeasure, horizon: f64, quad: QuadSettings) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(CovarianceModel::Spectral { measure, horizon, quad })
    }

    pub fn volterra(kernel: VolterraKernel, horizon: f64, quad: QuadSettings) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(CovarianceModel::Volterra { kernel, horizon, quad })
    }

    pub fn self_similar(
        profile: SelfSimilarProfile,
        horizon: f64,
        quad: QuadSettings,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(CovarianceModel::SelfSimilar { profile, horizon, quad })
    }

    /// The default cutoff 0.3 keeps the double logarithm positive
    /// (any `t_max < 1/e` works).
    pub fn modulated_fbm(hurst: f64, t_max: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if !(t_max > 0.0 && t_max < (-1.0f64).exp()) {
            return Err(Error::invalid(
                "t_max",
                format!("t_max = {t_max} must lie in (0, 1/e)"),
            ));
        }
        Ok(CovarianceModel::ModulatedFbm { hurst, t_max })
    }

    pub fn horizon(&self) -> f64 {
        match self {
            CovarianceModel::Fbm { horizon, .. }
            | CovarianceModel::Bm { horizon }
            | CovarianceModel::Ou { horizon, .. }
            | CovarianceModel::Spectral { horizon, .. }
            | CovarianceModel::Volterra { horizon, .. }
            | CovarianceModel::SelfSimilar { horizon, .. } => *horizon,
            CovarianceModel::ModulatedFbm { t_max, .. } => *t_max,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CovarianceModel::Fbm { .. } => "fbm",
            CovarianceModel::Bm { .. } => "bm",
            CovarianceModel::Ou { .. } => "ou",
            CovarianceModel::Spectral { .. } => "spectral",
            CovarianceModel::Volterra { .. } => "volterra",
            CovarianceModel::SelfSimilar { .. } => "selfsimilar",
            CovarianceModel::ModulatedFbm { .. } => "modulated-fbm",
        }
    }

    /// Whether the law of `X_{t+h} - X_t` is independent of `t`.
    pub fn has_stationary_increments(&self) -> bool {
        matches!(self, CovarianceModel::Fbm { .. } | CovarianceModel::Bm { .. })
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let max = self.horizon();
        if !(0.0..=max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfDomain { t, max });
        }
        Ok(())
    }

    /// Evaluate `R(s, t)`.
    pub fn cov(&self, s: f64, t: f64) -> Result<f64> {
        self.check_domain(s)?;
        self.check_domain(t)?;
        Ok(match self {
            CovarianceModel::Fbm { hurst, .. } => fbm_cov(*hurst, s, t),
            CovarianceModel::Bm { .. } => s.min(t),
            CovarianceModel::Ou { sigma, rate, .. } => {
                sigma * sigma * (-rate * (t - s).abs()).exp()
            }
            CovarianceModel::Spectral { measure, quad, .. } => {
                // r(tau) = atom + 2 * int_0^Lmax cos(lambda tau) density
                //        = atom + 2 * (mass - I(|tau|))
                let tau = (t - s).abs();
                let i = measure.increment_integral(tau, quad)?;
                measure.atom_at_zero() + 2.0 * (measure.truncated_mass() - i)
            }
            CovarianceModel::Volterra { kernel, quad, .. } => kernel.covariance(s, t, quad)?,
            CovarianceModel::SelfSimilar { profile, quad, .. } => {
                profile.kernel().covariance(s, t, quad)?
            }
            CovarianceModel::ModulatedFbm { hurst, .. } => {
                if s == 0.0 || t == 0.0 {
                    0.0
                } else {
                    modulation(s) * modulation(t) * fbm_cov(*hurst, s, t)
                }
            }
        })
    }

    /// Variance `sigma_X^2(t) = R(t, t)`.
    pub fn variance(&self, t: f64) -> Result<f64> {
        self.cov(t, t)
    }

    /// The increment metric `d_X(s, t) = sqrt(E[(X_t - X_s)^2])`.
    ///
    /// Radicands within `-1e-12 * scale` of zero clamp to 0; anything more
    /// negative signals an inconsistent covariance and is an error.
    pub fn increment_stddev(&self, s: f64, t: f64) -> Result<f64> {
        let rss = self.cov(s, s)?;
        let rtt = self.cov(t, t)?;
        let rst = self.cov(s, t)?;
        let radicand = rtt - 2.0 * rst + rss;
        if radicand >= 0.0 {
            return Ok(radicand.sqrt());
        }
        let scale = rss.abs().max(rtt.abs()).max(1.0);
        if radicand >= -RADICAND_CLAMP_REL * scale {
            Ok(0.0)
        } else {
            Err(Error::NumericalInconsistency { s, t, value: radicand })
        }
    }

    /// Gram matrix of the model on a strictly increasing grid.
    pub fn gram(&self, grid: &[f64]) -> Result<Matrix> {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        let n = grid.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.cov(grid[i], grid[j])?;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        Ok(m)
    }
}

impl std::fmt::Debug for CovarianceModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CovarianceModel::Fbm { hurst, horizon } => {
                write!(f, "Fbm {{ hurst: {hurst}, horizon: {horizon} }}")
            }
            CovarianceModel::Bm { horizon } => write!(f, "Bm {{ horizon: {horizon} }}"),
            CovarianceModel::Ou { sigma, rate, horizon } => {
                write!(f, "Ou {{ sigma: {sigma}, rate: {rate}, horizon: {horizon} }}")
            }
            CovarianceModel::Spectral { horizon, .. } => {
                write!(f, "Spectral {{ horizon: {horizon}, .. }}")
            }
            CovarianceModel::Volterra { horizon, .. } => {
                write!(f, "Volterra {{ horizon: {horizon}, .. }}")
            }
            CovarianceModel::SelfSimilar { horizon, .. } => {
                write!(f, "SelfSimilar {{ horizon: {horizon}, .. }}")
            }
            CovarianceModel::ModulatedFbm { hurst, t_max } => {
                write!(f, "ModulatedFbm {{ hurst: {hurst}, t_max: {t_max} }}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bm_cov_is_min() {
        let m = CovarianceModel::bm(1.0).unwrap();
        assert_abs_diff_eq!(m.cov(0.5, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(m.cov(1.0, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn fbm_variance_at_one() {
        let m = CovarianceModel::fbm(0.75, 1.0).unwrap();
        assert_abs_diff_eq!(m.cov(1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn ou_cov_closed_form() {
        let m = CovarianceModel::ou(1.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.cov(0.0, 1.0).unwrap(), (-2.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn fbm_increment_metric_is_power_law() {
        let m = CovarianceModel::fbm(0.7, 2.0).unwrap();
        assert_abs_diff_eq!(m.increment_stddev(0.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        let d = m.increment_stddev(0.3, 0.8).unwrap();
        assert_abs_diff_eq!(d, 0.5f64.powf(0.7), epsilon = 1e-12);
    }

    #[test]
    fn bm_increment_metric() {
        let m = CovarianceModel::bm(1.0).unwrap();
        assert_abs_diff_eq!(
            m.increment_stddev(0.25, 0.75).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn ou_increment_metric_closed_form() {
        let m = CovarianceModel::ou(1.0, 2.0, 1.0).unwrap();
        let expect = (2.0 * (1.0 - (-2.0f64).exp())).sqrt();
        assert_abs_diff_eq!(m.increment_stddev(0.0, 1.0).unwrap(), expect, epsilon = 1e-14);
    }

    #[test]
    fn coincident_increment_is_zero() {
        let m = CovarianceModel::fbm(0.4, 1.0).unwrap();
        assert_eq!(m.increment_stddev(0.6, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn gram_examples() {
        let bm = CovarianceModel::bm(1.0).unwrap();
        let g = bm.gram(&[0.5, 1.0]).unwrap();
        assert_eq!(
            [g.at(0, 0), g.at(0, 1), g.at(1, 0), g.at(1, 1)],
            [0.5, 0.5, 0.5, 1.0]
        );

        let fbm = CovarianceModel::fbm(0.5, 1.0).unwrap();
        let g1 = fbm.gram(&[1.0]).unwrap();
        assert_eq!(g1.at(0, 0), 1.0);

        let ou = CovarianceModel::ou(1.0, 1.0, 1.0).unwrap();
        let g2 = ou.gram(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(g2.at(0, 1), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(g2.at(0, 0), 1.0);
    }

    #[test]
    fn gram_rejects_unordered_grid() {
        let m = CovarianceModel::bm(1.0).unwrap();
        assert!(m.gram(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn out_of_domain_time_rejected() {
        let m = CovarianceModel::bm(1.0).unwrap();
        assert!(matches!(m.cov(0.0, 1.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(m.cov(-0.1, 0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn modulated_fbm_vanishes_at_origin() {
        let m = CovarianceModel::modulated_fbm(0.5, 0.3).unwrap();
        assert_eq!(m.cov(0.0, 0.2).unwrap(), 0.0);
        assert!(m.cov(0.1, 0.2).unwrap() > 0.0);
    }

    #[test]
    fn modulated_fbm_requires_small_cutoff() {
        assert!(CovarianceModel::modulated_fbm(0.5, 0.5).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(CovarianceModel::fbm(1.0, 1.0).is_err());
        assert!(CovarianceModel::fbm(0.5, 0.0).is_err());
        assert!(CovarianceModel::ou(0.0, 1.0, 1.0).is_err());
        assert!(CovarianceModel::ou(1.0, -1.0, 1.0).is_err());
    }
}
