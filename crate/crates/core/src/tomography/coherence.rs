use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::fockspace::{coherent_cutoff, thermal_cutoff, PhotonStatistics};
use crate::interaction::{spectrum_approx, Coupling, ElectronSpectrum, Engine, KRange};
use crate::io::fmt_f64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Coherent,
    Thermal,
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(Source::Coherent),
            "thermal" => Ok(Source::Thermal),
            other => Err(Error::invalid(format!("unsupported source family '{other}' (expected coherent or thermal)"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CoherenceOptions {
    /// Also compute P_k(τ).
    pub spectra: bool,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        CoherenceOptions { spectra: true }
    }
}

#[derive(Debug, Clone)]
pub struct CoherenceResult {
    pub source: Source,
    pub mean_n: f64,
    pub taus: Vec<f64>,
    pub g1_mod: Vec<f64>,
    pub g2_mod: Vec<f64>,
    pub bandwidth: f64,
    /// ⟨ñ(τ)⟩ and ⟨ñ²(τ)⟩.
    pub n_tilde: Vec<f64>,
    pub n_tilde_sq: Vec<f64>,
    /// Empty unless requested.
    pub spectra: Vec<ElectronSpectrum<f64>>,
}

impl CoherenceResult {
    /// CSV `tau,g1_mod,g2_mod`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["tau", "g1_mod", "g2_mod"])?;
        for i in 0..self.taus.len() {
            w.write_record([fmt_f64(self.taus[i]), fmt_f64(self.g1_mod[i]), fmt_f64(self.g2_mod[i])])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    /// Long CSV `tau,k,probability` of the spectra map.
    pub fn spectra_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["tau", "k", "probability"])?;
        for (t, s) in self.taus.iter().zip(&self.spectra) {
            for (k, p) in s.ks().zip(s.probs()) {
                w.write_record([fmt_f64(*t), k.to_string(), fmt_f64(*p)])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    /// Σ |g̃⁽²⁾(τ_{i+1}) − g̃⁽²⁾(τ_i)|.
    pub fn g2_total_variation(&self) -> f64 {
        self.g2_mod.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// First-order coherence of the delayed pair.
pub fn gamma(bandwidth: f64, tau: f64) -> f64 {
    (-0.5 * (bandwidth * tau).powi(2)).exp()
}

/// (⟨ñ⟩, ⟨ñ²⟩) for ñ = ¼ A†A, A = a(τ) + a(0), [A, A†] = 2 + 2γ.
fn n_tilde_moments(source: Source, n: f64, gm: f64) -> (f64, f64) {
    let aa = 2.0 * n * (1.0 + gm);
    let aaaa = match source {
        // phase diffusion with E cos Δ = γ, E cos 2Δ = γ⁴
        Source::Coherent => n * n * (6.0 + 8.0 * gm + 2.0 * gm.powi(4)),
        Source::Thermal => 2.0 * aa * aa,
    };
    (aa / 4.0, (aaaa + (2.0 + 2.0 * gm) * aa) / 16.0)
}

/// Nodes and weights for the relative phase Δ (wrapped normal, E cos Δ = γ).
fn phase_nodes(gm: f64) -> Vec<(f64, f64)> {
    if gm >= 1.0 {
        return vec![(0.0, 1.0)];
    }
    let sigma = (-2.0 * gm.ln()).sqrt();
    let mut nodes: Vec<(f64, f64)> = if sigma < 0.3 {
        let n = 161;
        (0..n)
            .map(|i| {
                let d = -8.0 * sigma + 16.0 * sigma * i as f64 / (n - 1) as f64;
                (d, (-0.5 * (d / sigma).powi(2)).exp())
            })
            .collect()
    } else {
        let n = 256;
        let jmax = ((39.0 / (0.5 * sigma * sigma)).sqrt().ceil() as usize).min(n / 2 - 1);
        (0..n)
            .map(|i| {
                let d = 2.0 * PI * i as f64 / n as f64;
                let f: f64 =
                    1.0 + 2.0 * (1..=jmax).map(|j| gm.powi((j * j) as i32) * (j as f64 * d).cos()).sum::<f64>();
                (d, f.max(0.0))
            })
            .collect()
    };
    let total: f64 = nodes.iter().map(|n| n.1).sum();
    nodes.iter_mut().for_each(|n| n.1 /= total);
    nodes.retain(|n| n.1 > 1e-18);
    nodes
}

/// P_k(τ) through the normalized composite mode b = A/√(2(1+γ)), which the
/// electron sees with coupling √(2(1+γ)) g.
fn spectrum_at(source: Source, n: f64, gm: f64, g: &Coupling<f64>) -> Result<ElectronSpectrum<f64>> {
    let gb = g.scaled((2.0 * (1.0 + gm)).sqrt());
    match source {
        Source::Thermal => {
            let stats = PhotonStatistics::thermal(n, thermal_cutoff(n, 1e-12));
            spectrum_approx(&stats, &gb, KRange::Auto)
        }
        Source::Coherent => {
            let nodes = phase_nodes(gm);
            let mean = |d: f64| n * (1.0 + d.cos()) / (1.0 + gm);
            let top = nodes.iter().map(|(d, _)| mean(*d)).fold(0.0f64, f64::max);
            let len = coherent_cutoff(top);
            let parts: Vec<ElectronSpectrum<f64>> = nodes
                .iter()
                .map(|(d, _)| spectrum_approx(&PhotonStatistics::poisson(mean(*d), len), &gb, KRange::Auto))
                .collect::<Result<_>>()?;
            let half = parts.iter().map(|s| s.k_max()).max().unwrap_or(0);
            let mut probs = vec![0.0; 2 * half as usize + 1];
            let mut leak = 0.0;
            for (s, (_, w)) in parts.iter().zip(&nodes) {
                for (k, p) in s.ks().zip(s.probs()) {
                    probs[(k + half) as usize] += w * p;
                }
                leak += w * s.leakage();
            }
            ElectronSpectrum::new(-half, probs, leak, Engine::Approx).map(|s| s.with_coupling(gb))
        }
    }
}

/// Modified coherence functions g̃⁽¹⁾(τ), g̃⁽²⁾(τ) of a delayed pair with
/// g⁽¹⁾(τ) = exp(−(Δω τ)²/2).
pub fn coherence_scan(
    source: Source,
    mean_n: f64,
    bandwidth: f64,
    g: &Coupling<f64>,
    taus: &[f64],
    opts: &CoherenceOptions,
) -> Result<CoherenceResult> {
    if !(bandwidth > 0.0 && bandwidth <= 0.5) {
        return Err(Error::invalid(format!("bandwidth must lie in (0, 0.5] (got {bandwidth})")));
    }
    if !(mean_n > 0.0 && mean_n.is_finite()) {
        return Err(Error::invalid(format!("mean photon number must be positive (got {mean_n})")));
    }
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("delays must be finite"));
    }
    let (n0, n0_sq) = n_tilde_moments(source, mean_n, 1.0);
    let base = (n0_sq - n0) / (n0 * n0);
    let mut n_tilde = Vec::with_capacity(taus.len());
    let mut n_tilde_sq = Vec::with_capacity(taus.len());
    let mut g1_mod = Vec::with_capacity(taus.len());
    let mut g2_mod = Vec::with_capacity(taus.len());
    for &tau in taus {
        let (m1, m2) = n_tilde_moments(source, mean_n, gamma(bandwidth, tau));
        n_tilde.push(m1);
        n_tilde_sq.push(m2);
        g1_mod.push((2.0 * m1 - n0) / n0);
        g2_mod.push(2.0 * (m2 - m1) / (m1 * m1) - base);
    }
    let spectra = if opts.spectra {
        taus.par_iter()
            .map(|&tau| {
                spectrum_at(source, mean_n, gamma(bandwidth, tau), g).map(|s| s.with_label(format!("tau={tau}")))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(CoherenceResult { source, mean_n, taus: taus.to_vec(), g1_mod, g2_mod, bandwidth, n_tilde, n_tilde_sq, spectra })
}
