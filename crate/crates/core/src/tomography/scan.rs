use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fockspace::{statistics, PhotonicState};
use crate::interaction::{
    lo_comb, spectrum_approx, spectrum_exact, two_point_spectrum, Coupling, ElectronSpectrum, Engine, ExactOptions,
    KRange, LoOrder, TwoPointOptions,
};
use crate::io::fmt_f64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// `Engine::Approx` (default) or `Engine::Exact`.
    pub engine: Engine,
    pub order: LoOrder,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { engine: Engine::Approx, order: LoOrder::LoFirst }
    }
}

/// Spectra of the LO phase sweep. `opposite[i]` is taken at θ_i + π.
#[derive(Debug, Clone)]
pub struct HomodyneScan {
    pub thetas: Vec<f64>,
    pub spectra: Vec<ElectronSpectrum<f64>>,
    pub opposite: Vec<ElectronSpectrum<f64>>,
    pub lo_only: ElectronSpectrum<f64>,
    pub quantum_only: ElectronSpectrum<f64>,
    /// Real and positive; the LO phase is θ.
    pub lo_amplitude: Complex64,
    pub g: Coupling<f64>,
    pub engine: Engine,
}

/// θ_j = jπ/count.
pub fn uniform_thetas(count: usize) -> Vec<f64> {
    (0..count).map(|j| PI * j as f64 / count as f64).collect()
}

/// Sweeps the LO phase. |α_LO|² = lo_ratio · max(⟨n⟩, 1).
pub fn homodyne_scan(
    state: &PhotonicState<f64>,
    lo_ratio: f64,
    g: &Coupling<f64>,
    thetas: &[f64],
    opts: &ScanOptions,
) -> Result<HomodyneScan> {
    if !(lo_ratio >= 10.0) {
        return Err(Error::invalid(format!("lo_ratio must be >= 10 for LO dominance (got {lo_ratio})")));
    }
    if thetas.is_empty() {
        return Err(Error::invalid("at least one LO phase is required"));
    }
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("LO phases must be finite"));
    }
    if !matches!(opts.engine, Engine::Approx | Engine::Exact) {
        return Err(Error::invalid(format!(
            "homodyne scans use the exact or approx engine, not {}",
            opts.engine.name()
        )));
    }
    let lo = (lo_ratio * state.mean_photon_number().max(1.0)).sqrt();
    let lo_amplitude = Complex64::new(lo, 0.0);
    let tp = TwoPointOptions { engine: opts.engine, order: opts.order, k_range: KRange::Auto };

    let run = |theta: f64| two_point_spectrum(state, lo_amplitude, theta, g, &tp);
    let spectra = thetas.par_iter().map(|&t| run(t)).collect::<Result<Vec<_>>>()?;
    let opposite = thetas.par_iter().map(|&t| run(t + PI)).collect::<Result<Vec<_>>>()?;

    let quantum_only = match opts.engine {
        Engine::Exact => {
            let eo = ExactOptions { joint: false, coherences: false, ..ExactOptions::default() };
            spectrum_exact(state, g, &eo)?.spectrum
        }
        _ => spectrum_approx(&statistics(state), g, KRange::Auto)?,
    }
    .with_label(state.label());

    Ok(HomodyneScan {
        thetas: thetas.to_vec(),
        spectra,
        opposite,
        lo_only: lo_spectrum(lo, g)?,
        quantum_only,
        lo_amplitude,
        g: *g,
        engine: opts.engine,
    })
}

/// |c_l|² of the LO comb alone.
fn lo_spectrum(lo: f64, g: &Coupling<f64>) -> Result<ElectronSpectrum<f64>> {
    let beta = g.magnitude() * lo;
    let mut half = crate::interaction::auto_k(beta);
    loop {
        let comb = lo_comb(Complex64::new(lo, 0.0), g, half);
        let probs: Vec<f64> = comb.iter().map(|c| c.norm_sqr()).collect();
        let total: f64 = probs.iter().sum();
        let leak = (1.0 - total).max(0.0);
        if leak < crate::interaction::SPEC_TOL || half > 100_000 {
            return Ok(ElectronSpectrum::new(-(half as i64), probs, leak, Engine::ClosedForm)?
                .with_coupling(*g)
                .with_label("lo_only"));
        }
        half *= 2;
    }
}

impl HomodyneScan {
    pub fn lo_intensity(&self) -> f64 {
        self.lo_amplitude.norm_sqr()
    }

    /// θ grid covers [0, π) at uniform spacing.
    pub fn is_uniform(&self) -> bool {
        let n = self.thetas.len();
        let step = PI / n as f64;
        self.thetas.iter().enumerate().all(|(j, t)| (t - step * j as f64).abs() < 1e-9)
    }

    /// Spectral width Σ k² P_k at each θ; equals 2|g|²⟨n_d⟩ for the Bessel kernel.
    pub fn k_second_moment(&self) -> Vec<f64> {
        self.spectra.iter().map(|s| s.moment(2)).collect()
    }

    /// Long-format CSV `theta,k,probability`, including the θ + π rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["theta", "k", "probability"])?;
        let rows = self.thetas.iter().zip(&self.spectra).map(|(t, s)| (*t, s));
        let opp = self.thetas.iter().zip(&self.opposite).map(|(t, s)| (*t + PI, s));
        for (t, s) in rows.chain(opp) {
            for (k, p) in s.ks().zip(s.probs()) {
                w.write_record([fmt_f64(t), k.to_string(), fmt_f64(*p)])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    /// Spectrum difference of two scans on a common k window, per θ.
    pub fn difference(&self, other: &HomodyneScan) -> Result<Vec<Vec<f64>>> {
        if self.thetas.len() != other.thetas.len() {
            return Err(Error::invalid("scans have different θ grids"));
        }
        Ok(self
            .spectra
            .iter()
            .zip(&other.spectra)
            .map(|(a, b)| {
                let lo = a.k_min().min(b.k_min());
                let hi = a.k_max().max(b.k_max());
                (lo..=hi).map(|k| a.get(k) - b.get(k)).collect()
            })
            .collect())
    }
}
