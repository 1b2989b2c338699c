//! Pathwise statistics: empirical Hölder constants and exponents, the
//! Garsia–Rodemich–Rumsey functional, and the moment formulas used by the
//! exponential-moment bound.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::regularity::{fit_holder_exponent, ExponentFit};
use crate::simulate::rng::SplitMix64;
use crate::simulate::SamplePath;

/// Above this grid size the pair scan restricts itself to dyadic index lags.
pub const PAIR_SCAN_CUTOFF: usize = 2048;

const BOOTSTRAP_RESAMPLES: usize = 1000;

/// The empirical Hölder constant of one path at a given order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderStat {
    pub order: f64,
    /// max over scanned pairs of |X_t - X_s| / |t - s|^order.
    pub constant: f64,
    /// The (t, s) pair attaining the maximum.
    pub argmax_pair: (f64, f64),
    /// True when the scan was restricted to dyadic index lags, making the
    /// constant a lower bound.
    pub restricted: bool,
}

/// A Monte Carlo estimate with a bootstrap confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    /// Half-width of the 95% bootstrap percentile interval.
    pub half_width: f64,
    pub n_samples: usize,
    /// Relative change between the first-half estimate and the full one.
    pub stability: f64,
    /// Samples whose exponential overflowed; nonzero means unstable.
    pub overflow_count: usize,
}

/// Convergence verdict for the exponential-moment series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesVerdict {
    Converged,
    Diverged,
    Undetermined,
}

fn index_lags_for(n: usize) -> (Vec<usize>, bool) {
    if n <= PAIR_SCAN_CUTOFF {
        ((1..n).collect(), false)
    } else {
        let mut lags = Vec::new();
        let mut l = 1usize;
        while l < n {
            lags.push(l);
            l *= 2;
        }
        // Always include the full diameter: large-separation pairs often
        // attain the maximum for small orders.
        if *lags.last().unwrap() != n - 1 {
            lags.push(n - 1);
        }
        (lags, true)
    }
}

/// The pathwise supremum ratio `max |X_t - X_s| / |t - s|^a`.
///
/// Full pair scan up to 2048 grid points; beyond that only dyadic index lags
/// are scanned and the result is a flagged lower bound.
pub fn path_holder_constant(path: &SamplePath, a: f64) -> Result<HolderStat> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid("a", format!("order {a} must be in (0, 1]")));
    }
    let n = path.grid.len();
    if n < 2 {
        return Err(Error::invalid("path", "need at least 2 grid points"));
    }
    let (lags, restricted) = index_lags_for(n);
    // On a uniform grid the denominator depends only on the index lag, so
    // hoist the power out of the inner scan.
    let uniform = uniform_dt(&path.grid).ok();
    let mut best = 0.0f64;
    let mut pair = (path.grid[0], path.grid[1.min(n - 1)]);
    for &lag in &lags {
        let fixed_denom = uniform.map(|dt| (lag as f64 * dt).powf(a));
        for i in 0..n - lag {
            let j = i + lag;
            let denom = match fixed_denom {
                Some(d) => d,
                None => (path.grid[j] - path.grid[i]).powf(a),
            };
            let ratio = (path.values[j] - path.values[i]).abs() / denom;
            if ratio > best {
                best = ratio;
                pair = (path.grid[j], path.grid[i]);
            }
        }
    }
    Ok(HolderStat {
        order: a,
        constant: best,
        argmax_pair: pair,
        restricted,
    })
}

fn uniform_dt(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::invalid("grid", "need at least 2 points"));
    }
    let dt = grid[1] - grid[0];
    if grid
        .windows(2)
        .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt)
    {
        return Err(Error::Capability(
            "this statistic requires a uniform grid".into(),
        ));
    }
    Ok(dt)
}

/// Empirical Hölder exponent: log-log slope of the max-increment modulus
/// `M(h) = max_t |X(t+h) - X(t)|` over the given integer grid-step lags.
///
/// Small index lags (the default 1..=8) keep the downward bias of the
/// max-based modulus within a few hundredths; wide dyadic lag ranges do not.
pub fn path_holder_exponent(path: &SamplePath, lags: &[usize]) -> Result<ExponentFit> {
    let dt = uniform_dt(&path.grid)?;
    let n = path.grid.len();
    let mut decay = Vec::with_capacity(lags.len());
    for &lag in lags {
        if lag == 0 || lag >= n {
            continue;
        }
        let m = (0..n - lag)
            .map(|i| (path.values[i + lag] - path.values[i]).abs())
            .fold(0.0f64, f64::max);
        decay.push((lag as f64 * dt, m));
    }
    fit_holder_exponent(&decay)
}

/// Default lag set for `path_holder_exponent`.
pub fn default_exponent_lags() -> Vec<usize> {
    (1..=8).collect()
}

/// The Garsia–Rodemich–Rumsey functional
/// `xi = (double-sum |X_u - X_v|^(2/eps) / |u - v|^(2H/eps) * dt^2)^(eps/2)`
/// over off-diagonal grid cells; diagonal cells contribute nothing (their
/// exact contribution vanishes under refinement for Hölder paths).
pub fn grr_xi(path: &SamplePath, hurst: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 2.0 * hurst) {
        return Err(Error::invalid(
            "eps",
            format!("need 0 < eps < 2H, got eps = {eps}, H = {hurst}"),
        ));
    }
    let dt = uniform_dt(&path.grid)?;
    let p = 2.0 / eps;
    let q = 2.0 * hurst / eps;
    let n = path.grid.len();
    let mut sum = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            let num = (path.values[i] - path.values[j]).abs().powf(p);
            let den = (path.grid[i] - path.grid[j]).powf(q);
            sum += num / den;
        }
    }
    // Off-diagonal cells appear twice in the symmetric double integral.
    Ok((2.0 * sum * dt * dt).powf(eps / 2.0))
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

/// 95% percentile half-width of `stat` under resampling with replacement.
fn bootstrap_half_width(values: &[f64], stat: impl Fn(&[f64]) -> f64, seed: u64) -> f64 {
    let n = values.len();
    let mut g = SplitMix64::new(seed);
    let mut replicates = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut scratch = vec![0.0f64; n];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for s in scratch.iter_mut() {
            *s = values[(g.next_u64() % n as u64) as usize];
        }
        replicates.push(stat(&scratch));
    }
    replicates.sort_by(|a, b| a.total_cmp(b));
    (percentile(&replicates, 0.975) - percentile(&replicates, 0.025)) / 2.0
}

fn relative_change(half: f64, full: f64) -> f64 {
    if full == 0.0 {
        if half == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((half - full) / full).abs()
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

/// Empirical version of the pathwise chaining constant: for each path,
/// `rho = C_(H-eps) / (T^(H-eps) * xi)`; the estimate is the maximum over
/// paths, with a bootstrap half-width and a first-half stability check.
pub fn grr_constant_estimate(
    paths: &[SamplePath],
    hurst: f64,
    eps: f64,
) -> Result<MomentEstimate> {
    if paths.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need >= 2 paths, got {}",
            paths.len()
        )));
    }
    let a = hurst - eps;
    if !(a > 0.0) {
        return Err(Error::invalid("eps", "need eps < H"));
    }
    let mut rhos = Vec::with_capacity(paths.len());
    for path in paths {
        let horizon = path.grid.last().unwrap() - path.grid[0];
        let c = path_holder_constant(path, a)?.constant;
        let xi = grr_xi(path, hurst, eps)?;
        if xi == 0.0 {
            if c == 0.0 {
                return Err(Error::InsufficientData(
                    "constant path: the ratio rho is undefined".into(),
                ));
            }
            return Err(Error::NumericalInconsistency {
                s: path.grid[0],
                t: *path.grid.last().unwrap(),
                value: c,
            });
        }
        rhos.push(c / (horizon.powf(a) * xi));
    }
    let value = max_of(&rhos);
    let half_width = bootstrap_half_width(&rhos, max_of, 0x6772725F726F);
    let stability = relative_change(max_of(&rhos[..rhos.len() / 2]), value);
    Ok(MomentEstimate {
        value,
        half_width,
        n_samples: rhos.len(),
        stability,
        overflow_count: 0,
    })
}

/// Absolute moment of a centered Gaussian:
/// `E|Z|^q = sigma^q * 2^(q/2) * Gamma((q+1)/2) / sqrt(pi)`.
pub fn gaussian_abs_moment(sigma: f64, q: f64) -> Result<f64> {
    if sigma < 0.0 {
        return Err(Error::invalid("sigma", "must be nonnegative"));
    }
    if !(q > 0.0) {
        return Err(Error::invalid("q", "must be positive"));
    }
    let log = q * 0.5 * std::f64::consts::LN_2 + ln_gamma((q + 1.0) / 2.0)
        - 0.5 * std::f64::consts::PI.ln();
    Ok(sigma.powf(q) * log.exp())
}

/// Sample mean of `exp(a * C^kappa)` with bootstrap half-width.
///
/// For `kappa = 2` the estimate is refused when the geometric term ratio
/// `a * c_fit^2` of the matching series reaches 1 (`c_fit` = root mean
/// square of the samples): beyond that point the expectation is infinite
/// and the sample mean is meaningless.
pub fn exp_moment_estimate(samples: &[f64], a: f64, kappa: f64) -> Result<MomentEstimate> {
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "need >= 100 samples, got {}",
            samples.len()
        )));
    }
    if !(kappa > 0.0 && kappa <= 2.0) {
        return Err(Error::invalid("kappa", "must be in (0, 2]"));
    }
    let n = samples.len();
    if a == 0.0 {
        return Ok(MomentEstimate {
            value: 1.0,
            half_width: 0.0,
            n_samples: n,
            stability: 0.0,
            overflow_count: 0,
        });
    }
    if kappa == 2.0 && a > 0.0 {
        let c_fit = (samples.iter().map(|c| c * c).sum::<f64>() / n as f64).sqrt();
        if a * c_fit * c_fit >= 1.0 {
            return Err(Error::invalid(
                "a",
                format!(
                    "kappa = 2 needs a < {:.6e} (1 / c_fit^2 with c_fit = {c_fit:.6e})",
                    1.0 / (c_fit * c_fit)
                ),
            ));
        }
    }
    let transformed: Vec<f64> = samples
        .iter()
        .map(|&c| (a * c.abs().powf(kappa)).exp())
        .collect();
    let overflow_count = transformed.iter().filter(|v| !v.is_finite()).count();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    if overflow_count > 0 {
        return Ok(MomentEstimate {
            value: f64::INFINITY,
            half_width: f64::INFINITY,
            n_samples: n,
            stability: f64::INFINITY,
            overflow_count,
        });
    }
    let value = mean(&transformed);
    let half_width = bootstrap_half_width(&transformed, mean, 0x657870);
    let stability = relative_change(mean(&transformed[..n / 2]), value);
    Ok(MomentEstimate {
        value,
        half_width,
        n_samples: n,
        stability,
        overflow_count,
    })
}

/// Partial sums of `sum_j a^j c^(kappa j) Gamma((kappa j + 1)/2) / Gamma(j+1)`
/// with the j = 0 term normalized to 1 (the moment expansion of
/// `E[exp(a C^kappa)]` starts at E[1]).
///
/// Terms are evaluated in log-space; partial sums that exceed the double
/// range saturate at infinity. The verdict inspects the term ratios over the
/// last 10 terms: strictly below 1 and nonincreasing means converged, above
/// 1 and nondecreasing means diverged, anything else is undetermined.
pub fn exp_moment_series(
    a: f64,
    c: f64,
    kappa: f64,
    j_max: usize,
) -> Result<(Vec<f64>, SeriesVerdict)> {
    if j_max < 2 {
        return Err(Error::invalid("j_max", "need at least 2 terms"));
    }
    if a < 0.0 {
        return Err(Error::invalid("a", "must be nonnegative"));
    }
    if !(c > 0.0) {
        return Err(Error::invalid("c", "must be positive"));
    }
    if !(kappa > 0.0 && kappa <= 2.0) {
        return Err(Error::invalid("kappa", "must be in (0, 2]"));
    }
    let mut sums = Vec::with_capacity(j_max + 1);
    let mut acc = 1.0f64;
    sums.push(acc);
    if a == 0.0 {
        sums.resize(j_max + 1, 1.0);
        return Ok((sums, SeriesVerdict::Converged));
    }
    let log_ac = a.ln() + kappa * c.ln();
    let mut log_terms = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let jf = j as f64;
        let log_term = jf * log_ac + ln_gamma((kappa * jf + 1.0) / 2.0) - ln_gamma(jf + 1.0);
        log_terms.push(log_term);
        acc += log_term.exp();
        sums.push(acc);
    }
    // Log term ratios over the last 10 terms.
    let tail = &log_terms[log_terms.len().saturating_sub(11)..];
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let all_below = ratios.iter().all(|&r| r < 0.0);
    let all_above = ratios.iter().all(|&r| r > 0.0);
    let nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let verdict = if all_below && nonincreasing {
        SeriesVerdict::Converged
    } else if all_above && nondecreasing {
        SeriesVerdict::Diverged
    } else {
        SeriesVerdict::Undetermined
    };
    Ok((sums, verdict))
}

/// The small-ball variance bound `2 x^2 / (pi p^2)`.
pub fn lemma1_bound(x: f64, p: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid("x", "must be positive"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid("p", "must be in (0, 1]"));
    }
    Ok(2.0 * x * x / (std::f64::consts::PI * p * p))
}
