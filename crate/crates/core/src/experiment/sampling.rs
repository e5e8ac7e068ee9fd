use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::interaction::{Coupling, ElectronSpectrum, Engine};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub electrons: usize,
    pub realizations: usize,
    pub g: Coupling<f64>,
    /// Relative standard deviation of |g| between realizations.
    pub g_jitter: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(electrons: usize, g: Coupling<f64>, seed: u64) -> Self {
        ExperimentConfig { electrons, realizations: 100, g, g_jitter: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.electrons == 0 {
            return Err(Error::invalid("electrons must be >= 1"));
        }
        if self.realizations == 0 {
            return Err(Error::invalid("realizations must be >= 1"));
        }
        if !(self.g_jitter >= 0.0 && self.g_jitter.is_finite()) {
            return Err(Error::invalid(format!("g_jitter must be >= 0 (got {})", self.g_jitter)));
        }
        Ok(())
    }
}

/// ChaCha8 substream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn draw_histogram(cdf: &[f64], n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut counts = vec![0u64; cdf.len()];
    let last = cdf.len() - 1;
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * cdf[last];
        let i = cdf.partition_point(|c| *c <= u).min(last);
        counts[i] += 1;
    }
    counts
}

pub(crate) fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p.max(0.0);
            acc
        })
        .collect()
}

pub(crate) fn histogram_spectrum(source: &ElectronSpectrum<f64>, counts: &[u64], n: usize) -> ElectronSpectrum<f64> {
    let probs: Vec<f64> = counts.iter().map(|c| *c as f64 / n as f64).collect();
    let mut s = ElectronSpectrum::new(source.k_min(), probs, 0.0, Engine::Sampled)
        .expect("histogram of a valid spectrum is normalized")
        .with_label(format!("{} sampled N={n}", source.label()));
    if let Some(g) = source.coupling() {
        s = s.with_coupling(g);
    }
    s
}

/// Normalized histogram of `n` draws (inverse CDF over increasing k).
pub fn sample_spectrum(spectrum: &ElectronSpectrum<f64>, n: usize, seed: u64) -> Result<ElectronSpectrum<f64>> {
    sample_spectrum_stream(spectrum, n, seed, 0)
}

pub fn sample_spectrum_stream(
    spectrum: &ElectronSpectrum<f64>,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<ElectronSpectrum<f64>> {
    if n == 0 {
        return Err(Error::invalid("at least one electron is required"));
    }
    let cdf = cumulative(spectrum.probs());
    if !(cdf.last().copied().unwrap_or(0.0) > 0.0) {
        return Err(Error::invalid("cannot sample an empty spectrum"));
    }
    let counts = draw_histogram(&cdf, n, &mut rng_for(seed, stream));
    Ok(histogram_spectrum(spectrum, &counts, n))
}
