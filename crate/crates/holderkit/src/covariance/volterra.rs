//! Volterra kernels, self-similar canonical profiles and the covariances
//! they induce, `R(s,t) = int_0^min(s,t) K(t,u) K(s,u) du`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_singular_upper, QuadSettings};

type Kernel2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A kernel `K(t, s)` with `K(t, s) = 0` whenever `s > t`.
#[derive(Clone)]
pub struct VolterraKernel {
    k: Kernel2,
    dk_dt: Option<Kernel2>,
    /// `K(t, u) ~ (t - u)^gamma` as `u -> t`, when the kernel blows up or
    /// vanishes at a known power on the diagonal.
    singularity_exponent: Option<f64>,
    /// `K(t, u) ~ u^eta` as `u -> 0`, for kernels singular at the origin.
    origin_exponent: Option<f64>,
}

impl VolterraKernel {
    pub fn new(k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        VolterraKernel {
            k: Arc::new(k),
            dk_dt: None,
            singularity_exponent: None,
            origin_exponent: None,
        }
    }

    pub fn with_derivative(
        mut self,
        dk_dt: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.dk_dt = Some(Arc::new(dk_dt));
        self
    }

    /// Declare the diagonal power. Requires `gamma > -1/2` so the kernel
    /// stays square-integrable near the diagonal.
    pub fn with_singularity_exponent(mut self, gamma: f64) -> Result<Self> {
        if gamma <= -0.5 {
            return Err(Error::invalid(
                "singularity_exponent",
                format!("gamma = {gamma} must exceed -1/2"),
            ));
        }
        self.singularity_exponent = Some(gamma);
        Ok(self)
    }

    pub fn with_origin_exponent(mut self, eta: f64) -> Result<Self> {
        if eta <= -0.5 {
            return Err(Error::invalid(
                "origin_exponent",
                format!("eta = {eta} must exceed -1/2"),
            ));
        }
        self.origin_exponent = Some(eta);
        Ok(self)
    }

    /// The Brownian-motion kernel `K(t, u) = 1` for `u <= t`.
    pub fn indicator() -> Self {
        VolterraKernel::new(|_, _| 1.0).with_derivative(|_, _| 0.0)
    }

    /// The Riemann-Liouville kernel `K(t, u) = (t - u)^(H - 1/2)`, whose
    /// Volterra process is Holder continuous of every order below `H`.
    pub fn riemann_liouville(hurst: f64) -> Result<Self> {
        if hurst <= 0.0 || hurst >= 1.0 {
            return Err(Error::invalid("hurst", "must lie in (0, 1)"));
        }
        let g = hurst - 0.5;
        let kernel = VolterraKernel::new(move |t: f64, u: f64| (t - u).powf(g))
            .with_derivative(move |t: f64, u: f64| g * (t - u).powf(g - 1.0));
        kernel.with_singularity_exponent(g)
    }

    /// `K(t, s)`, enforcing the Volterra property.
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        if s > t {
            0.0
        } else {
            (self.k)(t, s)
        }
    }

    /// `dK/dt (t, s)` when a derivative was supplied.
    pub fn eval_dt(&self, t: f64, s: f64) -> Option<f64> {
        self.dk_dt.as_ref().map(|d| if s > t { 0.0 } else { d(t, s) })
    }

    pub fn has_derivative(&self) -> bool {
        self.dk_dt.is_some()
    }

    pub fn singularity_exponent(&self) -> Option<f64> {
        self.singularity_exponent
    }

    /// `int_a^b g(u) du` where `g ~ (b - u)^alpha` near `b` and `~ u^eta`
    /// near the origin, with either exponent optional.
    fn integrate_with_hints(
        g: impl Fn(f64) -> f64 + Copy,
        b: f64,
        alpha: Option<f64>,
        eta: Option<f64>,
        settings: &QuadSettings,
    ) -> Result<f64> {
        let upper_singular = alpha.map(|a| a < 0.0).unwrap_or(false);
        let lower_singular = eta.map(|e| e < 0.0).unwrap_or(false);
        let half = QuadSettings {
            abs_tol: settings.abs_tol / 2.0,
            max_depth: settings.max_depth,
        };
        match (lower_singular, upper_singular) {
            (false, false) => integrate(g, 0.0, b, settings),
            (false, true) => integrate_singular_upper(g, 0.0, b, alpha.unwrap(), settings),
            (lower, upper) => {
                let mid = b / 2.0;
                let low = if lower {
                    // Mirror so the origin singularity sits at the upper end.
                    integrate_singular_upper(move |v| g(mid - v), 0.0, mid, eta.unwrap(), &half)?
                } else {
                    integrate(g, 0.0, mid, &half)?
                };
                let high = if upper {
                    integrate_singular_upper(g, mid, b, alpha.unwrap(), &half)?
                } else {
                    integrate(g, mid, b, &half)?
                };
                Ok(low + high)
            }
        }
    }

    /// The induced covariance `R(s, t) = int_0^min(s,t) K(t,u) K(s,u) du`.
    ///
    /// With a declared diagonal exponent the integrand behaves like
    /// `(m - u)^gamma` near `m = min(s,t)` (or `(m - u)^(2 gamma)` on the
    /// diagonal `s = t`), and a power-law substitution keeps the adaptive
    /// scheme convergent.
    pub fn covariance(&self, s: f64, t: f64, settings: &QuadSettings) -> Result<f64> {
        if s < 0.0 || t < 0.0 {
            return Err(Error::invalid("time", "must be nonnegative"));
        }
        let m = s.min(t);
        if m <= 0.0 {
            return Ok(0.0);
        }
        let g = |u: f64| self.eval(t, u) * self.eval(s, u);
        let diagonal = (s - t).abs() <= 1e-14 * s.max(t);
        let alpha = self
            .singularity_exponent
            .map(|gam| if diagonal { 2.0 * gam } else { gam });
        let eta = self.origin_exponent.map(|e| 2.0 * e);
        Self::integrate_with_hints(&g, m, alpha, eta, settings)
    }

    /// `int_s^t K(t, u)^2 du`, the first Volterra condition integrand.
    pub fn forward_square_integral(
        &self,
        s: f64,
        t: f64,
        settings: &QuadSettings,
    ) -> Result<f64> {
        if t <= s {
            return Ok(0.0);
        }
        let g = |u: f64| {
            let v = self.eval(t, u);
            v * v
        };
        match self.singularity_exponent {
            Some(gam) if gam < 0.0 => integrate_singular_upper(g, s, t, 2.0 * gam, settings),
            _ => integrate(g, s, t, settings),
        }
    }

    /// `int_0^s (K(t, u) - K(s, u))^2 du`, the second Volterra condition
    /// integrand. The difference is dominated by `K(s, u) ~ (s - u)^gamma`
    /// near the upper endpoint.
    pub fn increment_square_integral(
        &self,
        s: f64,
        t: f64,
        settings: &QuadSettings,
    ) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let g = |u: f64| {
            let d = self.eval(t, u) - self.eval(s, u);
            d * d
        };
        let alpha = self.singularity_exponent.map(|gam| 2.0 * gam);
        let eta = self.origin_exponent.map(|e| 2.0 * e);
        Self::integrate_with_hints(&g, s, alpha, eta, settings)
    }
}

impl std::fmt::Debug for VolterraKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VolterraKernel")
            .field("has_derivative", &self.dk_dt.is_some())
            .field("singularity_exponent", &self.singularity_exponent)
            .field("origin_exponent", &self.origin_exponent)
            .finish()
    }
}

/// The canonical profile `F` on `(0, 1)` of a purely non-deterministic
/// self-similar process with index `beta`.
#[derive(Clone)]
pub struct SelfSimilarProfile {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    beta: f64,
    /// `F(x) ~ (1 - x)^a` as `x -> 1`, when known.
    edge_exponent: Option<f64>,
    /// `F(x) ~ x^b` as `x -> 0`, when known.
    origin_exponent: Option<f64>,
}

impl SelfSimilarProfile {
    /// Build a profile, verifying positivity on a sample grid and square
    /// integrability by a stabilizing sequence of truncated integrals.
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::invalid("beta", "must be positive"));
        }
        for k in 1..200 {
            let x = k as f64 / 200.0;
            let v = f(x);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(
                    "profile",
                    format!("F({x}) = {v} is not strictly positive and finite"),
                ));
            }
        }
        // Truncated L2 masses must stabilize as the cut shrinks.
        let settings = QuadSettings::with_tol(1e-10);
        let mut prev = None;
        let mut last_change = f64::INFINITY;
        for k in [8u32, 12, 16, 20, 24, 26] {
            let cut = 2.0f64.powi(-(k as i32));
            let mass = integrate(|x| f(x) * f(x), cut, 1.0 - cut, &settings)?;
            if let Some(p) = prev {
                last_change = (mass - p) / mass.max(f64::MIN_POSITIVE);
            }
            prev = Some(mass);
        }
        if !(last_change.abs() < 1e-3) {
            return Err(Error::invalid(
                "profile",
                "F does not appear square-integrable on (0, 1)",
            ));
        }
        Ok(SelfSimilarProfile {
            f: Arc::new(f),
            beta,
            edge_exponent: None,
            origin_exponent: None,
        })
    }

    pub fn with_edge_exponent(mut self, a: f64) -> Self {
        self.edge_exponent = Some(a);
        self
    }

    pub fn with_origin_exponent(mut self, b: f64) -> Self {
        self.origin_exponent = Some(b);
        self
    }

    /// A constant profile. With `value = 1`, `beta = 1/2` this is Brownian
    /// motion.
    pub fn constant(value: f64, beta: f64) -> Result<Self> {
        if !(value > 0.0) {
            return Err(Error::invalid("value", "must be positive"));
        }
        SelfSimilarProfile::new(move |_| value, beta)
    }

    /// The boundary-saturating profile `F(x) = x^(beta-H) (1-x)^(H-1/2)`.
    pub fn power(beta: f64, hurst: f64) -> Result<Self> {
        if hurst <= 0.0 || hurst >= 1.0 {
            return Err(Error::invalid("hurst", "must lie in (0, 1)"));
        }
        let p = SelfSimilarProfile::new(
            move |x: f64| x.powf(beta - hurst) * (1.0 - x).powf(hurst - 0.5),
            beta,
        )?;
        Ok(p.with_edge_exponent(hurst - 0.5).with_origin_exponent(beta - hurst))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The canonical Volterra kernel `K(t, u) = t^(beta - 1/2) F(u/t)` for
    /// `u < t`, 0 otherwise (and 0 at `t = 0` by convention).
    pub fn kernel(&self) -> VolterraKernel {
        let f = Arc::clone(&self.f);
        let beta = self.beta;
        let mut k = VolterraKernel::new(move |t: f64, u: f64| {
            if t <= 0.0 {
                0.0
            } else {
                t.powf(beta - 0.5) * f(u / t)
            }
        });
        k.singularity_exponent = self.edge_exponent;
        k.origin_exponent = self.origin_exponent;
        k
    }
}

impl std::fmt::Debug for SelfSimilarProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SelfSimilarProfile")
            .field("beta", &self.beta)
            .field("edge_exponent", &self.edge_exponent)
            .field("origin_exponent", &self.origin_exponent)
            .finish()
    }
}

/// A kernel tabulated on a rectangular `(t, s)` grid, bilinearly
/// interpolated. The entry point for user-defined kernels.
#[derive(Debug, Clone)]
pub struct TabulatedKernel {
    t_grid: Vec<f64>,
    s_grid: Vec<f64>,
    /// Row-major, `values[i * s_grid.len() + j] = K(t_i, s_j)`.
    values: Vec<f64>,
}

impl TabulatedKernel {
    /// Build from `(t, s, K)` triples covering a complete rectangular grid.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::invalid("triples", "no samples given"));
        }
        let mut t_grid: Vec<f64> = triples.iter().map(|p| p.0).collect();
        let mut s_grid: Vec<f64> = triples.iter().map(|p| p.1).collect();
        for g in [&mut t_grid, &mut s_grid] {
            g.sort_by(|a, b| a.total_cmp(b));
            g.dedup();
        }
        if t_grid.len() < 2 || s_grid.len() < 2 {
            return Err(Error::invalid("triples", "need at least a 2x2 grid"));
        }
        let nt = t_grid.len();
        let ns = s_grid.len();
        let mut values = vec![f64::NAN; nt * ns];
        for &(t, s, k) in triples {
            let i = t_grid.partition_point(|&x| x < t);
            let j = s_grid.partition_point(|&x| x < s);
            values[i * ns + j] = k;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid(
                "triples",
                "samples do not cover the full rectangular (t, s) grid",
            ));
        }
        Ok(TabulatedKernel { t_grid, s_grid, values })
    }

    fn bracket(grid: &[f64], x: f64) -> (usize, f64) {
        if x <= grid[0] {
            return (0, 0.0);
        }
        if x >= grid[grid.len() - 1] {
            return (grid.len() - 2, 1.0);
        }
        let hi = grid.partition_point(|&g| g <= x);
        let i = hi - 1;
        let w = (x - grid[i]) / (grid[i + 1] - grid[i]);
        (i, w)
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        if s > t {
            return 0.0;
        }
        let ns = self.s_grid.len();
        let (i, wt) = Self::bracket(&self.t_grid, t);
        let (j, ws) = Self::bracket(&self.s_grid, s);
        let v00 = self.values[i * ns + j];
        let v01 = self.values[i * ns + j + 1];
        let v10 = self.values[(i + 1) * ns + j];
        let v11 = self.values[(i + 1) * ns + j + 1];
        (1.0 - wt) * ((1.0 - ws) * v00 + ws * v01) + wt * ((1.0 - ws) * v10 + ws * v11)
    }

    pub fn into_kernel(self) -> VolterraKernel {
        VolterraKernel::new(move |t, s| self.eval(t, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn indicator_recovers_brownian_motion() {
        let k = VolterraKernel::indicator();
        let s = QuadSettings::default();
        assert_abs_diff_eq!(k.covariance(0.5, 1.0, &s).unwrap(), 0.5, epsilon = 1e-9);
        assert_eq!(k.covariance(0.0, 1.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn riemann_liouville_diagonal_variance() {
        // int_0^t (t-u)^(2H-1) du = t^(2H) / (2H); at t = 1, H = 0.25 -> 2.
        let k = VolterraKernel::riemann_liouville(0.25).unwrap();
        let s = QuadSettings::default();
        assert_abs_diff_eq!(k.covariance(1.0, 1.0, &s).unwrap(), 2.0, epsilon = 1e-7);
    }

    #[test]
    fn volterra_property_enforced() {
        let k = VolterraKernel::riemann_liouville(0.7).unwrap();
        assert_eq!(k.eval(1.0, 2.0), 0.0);
        assert_eq!(k.eval_dt(1.0, 2.0), Some(0.0));
    }

    #[test]
    fn selfsimilar_kernel_examples() {
        // F = 1, beta = 1/2 is the indicator kernel.
        let p = SelfSimilarProfile::constant(1.0, 0.5).unwrap();
        let k = p.kernel();
        assert_abs_diff_eq!(k.eval(1.0, 0.5), 1.0, epsilon = 1e-14);
        assert_eq!(k.eval(1.0, 2.0), 0.0);

        // K(2, 1) for F(x) = x, beta = 3/2 -> 2^1 * (1/2) = 1.
        let p = SelfSimilarProfile::new(|x| x, 1.5).unwrap();
        let k = p.kernel();
        assert_abs_diff_eq!(k.eval(2.0, 1.0), 1.0, epsilon = 1e-14);
        assert_eq!(k.eval(0.0, 0.0), 0.0);
    }

    #[test]
    fn profile_positivity_enforced() {
        assert!(SelfSimilarProfile::new(|x| x - 0.5, 1.0).is_err());
    }

    #[test]
    fn profile_square_integrability_enforced() {
        // 1/x is positive but not in L2(0, 1).
        assert!(SelfSimilarProfile::new(|x| 1.0 / x, 1.0).is_err());
    }

    #[test]
    fn power_profile_is_valid_for_rough_hurst() {
        let p = SelfSimilarProfile::power(0.25, 0.25).unwrap();
        assert!(p.eval(0.5) > 0.0);
    }

    #[test]
    fn tabulated_kernel_interpolates() {
        // K(t, s) = t on a 3x3 grid.
        let mut triples = Vec::new();
        for &t in &[0.0, 0.5, 1.0] {
            for &s in &[0.0, 0.5, 1.0] {
                triples.push((t, s, t));
            }
        }
        let k = TabulatedKernel::from_triples(&triples).unwrap();
        assert_abs_diff_eq!(k.eval(0.75, 0.25), 0.75, epsilon = 1e-14);
        assert_eq!(k.eval(0.25, 0.75), 0.0);
    }

    #[test]
    fn tabulated_kernel_rejects_ragged_grid() {
        let triples = [(0.0, 0.0, 1.0), (1.0, 1.0, 1.0), (0.0, 1.0, 1.0)];
        assert!(TabulatedKernel::from_triples(&triples).is_err());
    }
}
