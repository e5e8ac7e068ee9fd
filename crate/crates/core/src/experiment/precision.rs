use rayon::prelude::*;
use serde::Serialize;

use super::sampling::{cumulative, draw_histogram, histogram_spectrum, rng_for, ExperimentConfig};
use crate::fockspace::{statistics, PhotonicState};
use crate::interaction::{spectrum_approx, Coupling, ElectronSpectrum, KRange};
use crate::io::fmt_f64;
use crate::reconstruction::{build_kernel, moments_from_spectrum, MomentKernel, MomentStatus, PeakPolicy};
use crate::{Error, Result};
use rand::Rng;

/// Decades 10 … 10⁶.
pub const DEFAULT_SWEEP: [usize; 6] = [10, 100, 1_000, 10_000, 100_000, 1_000_000];

#[derive(Debug, Clone, Serialize)]
pub struct PrecisionReport {
    pub electrons: Vec<usize>,
    /// deviations[i][m − 1]: mean |⟨n^m⟩_est − ⟨n^m⟩| / ⟨n^m⟩ at electrons[i].
    pub deviations: Vec<Vec<f64>>,
    /// Realizations whose inversion failed, per sweep point.
    pub failures: Vec<usize>,
    pub realizations: usize,
    pub order: usize,
    pub truth: Vec<f64>,
    pub seed: u64,
    pub g_jitter: f64,
    /// Fitted log-log slope of the deviation against N, per moment.
    pub exponents: Vec<f64>,
    /// Where the sampled spectra were written, if anywhere.
    pub archive: Option<String>,
}

impl PrecisionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV `N,m,rel_error`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["N", "m", "rel_error"])?;
        for (n, row) in self.electrons.iter().zip(&self.deviations) {
            for (m, d) in row.iter().enumerate() {
                w.write_record([n.to_string(), (m + 1).to_string(), fmt_f64(*d)])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Least-squares slope of y against x.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn kernel_for(spectrum: &ElectronSpectrum<f64>, g: &Coupling<f64>, order: usize) -> Result<MomentKernel<f64>> {
    build_kernel(g, order, (spectrum.k_max() as usize).max(order))
}

/// Per-realization relative deviations, or `None` if the inversion failed.
fn one_realization(
    truth_spec: &ElectronSpectrum<f64>,
    cdf: &[f64],
    kernel: &MomentKernel<f64>,
    truth: &[f64],
    ctx: (&PhotonicState<f64>, &ExperimentConfig),
    n: usize,
    stream: u64,
) -> Result<Option<Vec<f64>>> {
    let (state, cfg) = ctx;
    let mut rng = rng_for(cfg.seed, stream);
    let sampled = if cfg.g_jitter > 0.0 {
        let factor = (1.0 + cfg.g_jitter * standard_normal(&mut rng)).max(0.0);
        let gj = cfg.g.scaled(factor);
        let spec = spectrum_approx(&statistics(state), &gj, KRange::Symmetric((truth_spec.k_max() as usize) * 2))
            .or_else(|_| spectrum_approx(&statistics(state), &gj, KRange::Auto))?;
        let counts = draw_histogram(&cumulative(spec.probs()), n, &mut rng);
        histogram_spectrum(&spec, &counts, n)
    } else {
        let counts = draw_histogram(cdf, n, &mut rng);
        histogram_spectrum(truth_spec, &counts, n)
    };
    let est = match moments_from_spectrum(&sampled, kernel, &PeakPolicy::default()) {
        Ok(e) if e.status != MomentStatus::NoiseDominated => e,
        _ => return Ok(None),
    };
    Ok(Some(est.moments.values().iter().zip(truth).map(|(e, t)| ((e - t) / t).abs()).collect()))
}

/// Sample, invert and average the relative moment error over realizations,
/// for each electron count in `sweep`.
pub fn precision_curve(
    state: &PhotonicState<f64>,
    config: &ExperimentConfig,
    order: usize,
    sweep: &[usize],
) -> Result<PrecisionReport> {
    config.validate()?;
    if sweep.is_empty() || sweep.contains(&0) {
        return Err(Error::invalid("electron sweep must be non-empty with counts >= 1"));
    }
    let stats = statistics(state);
    let truth: Vec<f64> = (1..=order).map(|m| stats.moment(m as u32)).collect();
    if truth.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid("relative deviations need non-zero moments"));
    }
    let spec = spectrum_approx(&stats, &config.g, KRange::Auto)?.with_label(state.label());
    let kernel = kernel_for(&spec, &config.g, order)?;
    let cdf = cumulative(spec.probs());

    let mut deviations = Vec::new();
    let mut failures = Vec::new();
    for (i, &n) in sweep.iter().enumerate() {
        let per: Vec<Option<Vec<f64>>> = (0..config.realizations)
            .into_par_iter()
            .map(|r| {
                let stream = ((i as u64) << 32) | r as u64;
                one_realization(&spec, &cdf, &kernel, &truth, (state, config), n, stream)
            })
            .collect::<Result<_>>()?;
        let ok: Vec<&Vec<f64>> = per.iter().flatten().collect();
        failures.push(per.len() - ok.len());
        let mean: Vec<f64> = (0..order)
            .map(|m| if ok.is_empty() { f64::NAN } else { ok.iter().map(|d| d[m]).sum::<f64>() / ok.len() as f64 })
            .collect();
        deviations.push(mean);
    }
    let exponents = (0..order)
        .map(|m| {
            let pts: Vec<(f64, f64)> = sweep
                .iter()
                .zip(&deviations)
                .filter(|(_, d)| d[m].is_finite() && d[m] > 0.0)
                .map(|(n, d)| ((*n as f64).ln(), d[m].ln()))
                .collect();
            if pts.len() < 2 {
                return f64::NAN;
            }
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            slope(&x, &y)
        })
        .collect();
    Ok(PrecisionReport {
        electrons: sweep.to_vec(),
        deviations,
        failures,
        realizations: config.realizations,
        order,
        truth,
        seed: config.seed,
        g_jitter: config.g_jitter,
        exponents,
        archive: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct JitterReport {
    /// Relative coupling errors Δ|g|/|g|.
    pub jitters: Vec<f64>,
    /// deviations[j][m − 1] = Δ⟨n^m⟩/⟨n^m⟩ (signed).
    pub deviations: Vec<Vec<f64>>,
    /// Fitted slope per moment; ≈ 2m.
    pub slopes: Vec<f64>,
}

impl JitterReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV `jitter,m,rel_deviation`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["jitter", "m", "rel_deviation"])?;
        for (j, row) in self.jitters.iter().zip(&self.deviations) {
            for (m, d) in row.iter().enumerate() {
                w.write_record([fmt_f64(*j), (m + 1).to_string(), fmt_f64(*d)])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Forward spectra at |g|(1 + δ), inverted with the nominal kernel.
pub fn jitter_sensitivity(
    state: &PhotonicState<f64>,
    g: &Coupling<f64>,
    jitters: &[f64],
    order: usize,
) -> Result<JitterReport> {
    if jitters.is_empty() {
        return Err(Error::invalid("jitter grid is empty"));
    }
    if let Some(j) = jitters.iter().find(|j| !(j.abs() <= 0.2)) {
        return Err(Error::invalid(format!("jitter {j} is outside ±20%")));
    }
    let stats = statistics(state);
    let truth: Vec<f64> = (1..=order).map(|m| stats.moment(m as u32)).collect();
    let policy = PeakPolicy { rtol: 1e-12, noise_floor: 0.0 };
    let spectra: Vec<ElectronSpectrum<f64>> =
        jitters.par_iter().map(|j| spectrum_approx(&stats, &g.scaled(1.0 + j), KRange::Auto)).collect::<Result<_>>()?;
    let top = spectra.iter().map(|s| s.k_max() as usize).max().unwrap_or(order).max(order);
    let kernel = build_kernel(g, order, top)?;
    let deviations: Vec<Vec<f64>> = spectra
        .iter()
        .map(|s| {
            let est = moments_from_spectrum(s, &kernel, &policy)?;
            Ok(est.moments.values().iter().zip(&truth).map(|(e, t)| (e - t) / t).collect())
        })
        .collect::<Result<_>>()?;
    let slopes = (0..order)
        .map(|m| {
            if jitters.len() < 2 {
                return f64::NAN;
            }
            let y: Vec<f64> = deviations.iter().map(|d| d[m]).collect();
            slope(jitters, &y)
        })
        .collect();
    Ok(JitterReport { jitters: jitters.to_vec(), deviations, slopes })
}
