//! Circulant embedding (Davies-Harte) for exact sampling of
//! stationary-increment Gaussian models on uniform grids.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::simulate::rng::NormalStream;

/// Negative circulant eigenvalues below this fraction of the largest are
/// round-off and clipped to zero; anything larger aborts.
const CLIP_REL_TOL: f64 = 1e-8;

/// Prepared sampler for `n` unit-variance-scaled stationary increments with
/// autocovariance `gamma(0..=n)`.
pub struct CirculantSampler {
    /// sqrt(eigenvalue / (2 M)) per frequency, M = 2n.
    scale: Vec<f64>,
    n: usize,
    /// Fraction of total eigenvalue mass clipped away.
    pub clipped_mass: f64,
}

/// Autocovariance of unit-spacing fractional Gaussian noise.
pub fn fgn_autocovariance(hurst: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let k = k as f64;
            0.5 * ((k + 1.0).powf(2.0 * hurst) - 2.0 * k.powf(2.0 * hurst)
                + (k - 1.0).abs().powf(2.0 * hurst))
        })
        .collect()
}

impl CirculantSampler {
    /// Embed the autocovariance in a circulant of size `2n` and take the
    /// eigenvalue square roots.
    pub fn new(gamma: &[f64]) -> Result<Self> {
        let n = gamma.len() - 1;
        if n == 0 {
            return Err(Error::invalid("gamma", "need at least two autocovariances"));
        }
        let m = 2 * n;
        let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
        row.extend(gamma.iter().map(|&g| Complex::new(g, 0.0)));
        row.extend(gamma[1..n].iter().rev().map(|&g| Complex::new(g, 0.0)));
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut row);

        let eigs: Vec<f64> = row.iter().map(|c| c.re).collect();
        let max_eig = eigs.iter().fold(0.0f64, |a, &b| a.max(b));
        let total: f64 = eigs.iter().map(|e| e.abs()).sum();
        let mut clipped = 0.0;
        let mut scale = Vec::with_capacity(m);
        for &e in &eigs {
            let lam = if e < 0.0 {
                if -e > CLIP_REL_TOL * max_eig {
                    return Err(Error::Embedding { mass: -e / max_eig });
                }
                clipped += -e;
                0.0
            } else {
                e
            };
            scale.push((lam / (2.0 * m as f64)).sqrt());
        }
        Ok(CirculantSampler {
            scale,
            n,
            clipped_mass: if total > 0.0 { clipped / total } else { 0.0 },
        })
    }

    /// One vector of `n` stationary increments from the given seed.
    ///
    /// The frequency draws follow a fixed order so the output depends only
    /// on the seed.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let m = 2 * self.n;
        let mut stream = NormalStream::new(seed);
        let mut freq: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); m];
        freq[0] = Complex::new(std::f64::consts::SQRT_2 * self.scale[0] * stream.next(), 0.0);
        freq[self.n] = Complex::new(
            std::f64::consts::SQRT_2 * self.scale[self.n] * stream.next(),
            0.0,
        );
        for k in 1..self.n {
            let re = stream.next();
            let im = stream.next();
            freq[k] = Complex::new(self.scale[k] * re, self.scale[k] * im);
            freq[m - k] = freq[k].conj();
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut freq);
        freq.iter().take(self.n).map(|c| c.re).collect()
    }
}
