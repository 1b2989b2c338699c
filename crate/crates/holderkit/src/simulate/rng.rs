//! Deterministic, splittable random streams.
//!
//! Path `i` of a simulation draws from the stream keyed by
//! `mix_seed(seed, i)`, so results are bit-identical regardless of the
//! evaluation order or thread schedule.

use std::f64::consts::PI;

/// SplitMix64: a counter-based 64-bit generator with a one-step state
/// transition, identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in (0, 1]; never 0, so logarithms stay finite.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }
}

/// Derive an independent stream seed for a substream index.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut g = SplitMix64::new(seed ^ stream.wrapping_mul(0xD1B54A32D192ED03));
    g.next_u64() ^ g.next_u64().rotate_left(23)
}

/// A stream of standard normal variates (Box-Muller over SplitMix64).
#[derive(Debug, Clone)]
pub struct NormalStream {
    gen: SplitMix64,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            gen: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.gen.next_unit();
        let u2 = self.gen.next_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn take(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}

/// Deterministic sequence of `n` independent standard normals.
pub fn standard_normals(seed: u64, n: usize) -> Vec<f64> {
    NormalStream::new(seed).take(n)
}
