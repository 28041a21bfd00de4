//! Poisson counting simulation, repeated-run aggregation, and first-order
//! Gaussian error propagation.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::WeakValueEstimate;

#[derive(Debug, Error, PartialEq)]
pub enum StochasticsError {
    #[error("cannot aggregate an empty run set")]
    EmptyRunSet,
    #[error("run set mixes methods or paths")]
    MixedRunSet,
    #[error("aggregation requires every sigma > 0")]
    NonPositiveSigma,
}

/// A value with a 1σ Gaussian uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

impl Measured {
    pub fn new(value: f64, sigma: f64) -> Self {
        assert!(
            sigma >= 0.0 && sigma.is_finite(),
            "sigma must be finite and >= 0"
        );
        Self { value, sigma }
    }

    /// A value with no uncertainty attached.
    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0)
    }
}

/// Raw detector counts over a dwell time, with √N counting statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountSample {
    counts: u64,
    dwell: f64,
}

impl CountSample {
    pub fn new(counts: u64, dwell: f64) -> Self {
        assert!(dwell > 0.0 && dwell.is_finite(), "dwell must be positive");
        Self { counts, dwell }
    }

    pub fn counts(&self) -> u64 {
        self.counts
    }

    pub fn dwell(&self) -> f64 {
        self.dwell
    }

    /// Count rate in counts/s.
    pub fn rate(&self) -> f64 {
        self.counts as f64 / self.dwell
    }

    /// √N rate uncertainty with a one-count floor, so zero-count samples
    /// never get infinite weight.
    pub fn sigma_rate(&self) -> f64 {
        (self.counts.max(1) as f64).sqrt() / self.dwell
    }
}

/// A named, independently seeded random stream. Two streams with the same
/// seed but different names are independent; a given (seed, name) pair
/// reproduces the same sequence on every run.
#[derive(Debug, Clone)]
pub struct CountingStream {
    rng: ChaCha12Rng,
}

impl CountingStream {
    pub fn new(seed: u64, name: &str) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a(name.as_bytes()));
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }
}

// FNV-1a, fixed here so stream selection never depends on std's hasher.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One Poisson draw with the given mean. Deterministic given the stream state;
/// a zero mean always yields zero counts.
pub fn draw_poisson(mean: f64, stream: &mut CountingStream) -> u64 {
    assert!(
        mean.is_finite() && mean >= 0.0,
        "Poisson mean must be finite and >= 0"
    );
    if mean == 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    let draw: f64 = dist.sample(&mut stream.rng);
    draw as u64
}

/// First-order Gaussian propagation through `f`, with partial derivatives by
/// central finite differences (step `max(1e-6, 1e-6·|x_i|)` per input).
/// Inputs are treated as independent.
pub fn propagate<F>(f: F, inputs: &[Measured]) -> Measured
where
    F: Fn(&[f64]) -> f64,
{
    let x: Vec<f64> = inputs.iter().map(|m| m.value).collect();
    let value = f(&x);
    let mut variance = 0.0;
    let mut probe = x.clone();
    for (i, m) in inputs.iter().enumerate() {
        if m.sigma == 0.0 {
            continue;
        }
        let h = (1e-6_f64).max(1e-6 * m.value.abs());
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        let slope = (up - down) / (2.0 * h);
        variance += slope * slope * m.sigma * m.sigma;
    }
    Measured::new(value, variance.sqrt())
}

/// Inverse-variance weighted mean of repeated, independent estimates of the
/// same observable. All runs must share method and path and have sigma > 0.
pub fn aggregate(runs: &[WeakValueEstimate]) -> Result<WeakValueEstimate, StochasticsError> {
    let first = runs.first().ok_or(StochasticsError::EmptyRunSet)?;
    if runs
        .iter()
        .any(|r| r.method != first.method || r.path != first.path)
    {
        return Err(StochasticsError::MixedRunSet);
    }
    if runs.iter().any(|r| r.sigma <= 0.0) {
        return Err(StochasticsError::NonPositiveSigma);
    }
    let mut wsum = 0.0;
    let mut vsum = 0.0;
    for r in runs {
        let w = 1.0 / (r.sigma * r.sigma);
        wsum += w;
        vsum += w * r.value;
    }
    Ok(WeakValueEstimate {
        value: vsum / wsum,
        sigma: (1.0 / wsum).sqrt(),
        method: first.method,
        path: first.path,
    })
}
