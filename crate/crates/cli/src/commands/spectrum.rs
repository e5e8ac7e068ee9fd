use serde::{Deserialize, Serialize};

use qpinem::interaction::{
    oracle_spectrum, spectrum_approx, spectrum_closed_form, spectrum_exact, ElectronSpectrum, ExactOptions, KRange,
    OracleOptions,
};
use qpinem::{Error, Result};

use super::{coupling, list, long_csv, spectra_matrix};
use crate::config::{overlay, section, Common, Format};
use crate::output::Output;
use crate::state::{StateArgs, StateSpec};
use crate::svg;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    state: StateArgs,
    /// Coupling magnitude |g|.
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    g_phase: Option<f64>,
    /// exact, approx, closed-form or oracle.
    #[arg(long)]
    engine: Option<String>,
    /// Fixed ladder half-width instead of the automatic window.
    #[arg(long)]
    k_max: Option<usize>,
    /// Comma-separated ⟨n⟩ values for an intensity map.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub state: StateSpec,
    pub g: f64,
    pub g_phase: f64,
    pub engine: String,
    pub k_max: Option<usize>,
    pub sweep: Vec<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            state: StateSpec::default(),
            g: 0.1,
            g_phase: 0.0,
            engine: "approx".into(),
            k_max: None,
            sweep: Vec::new(),
        }
    }
}

pub fn compute(state: &StateSpec, p: &Params) -> Result<ElectronSpectrum<f64>> {
    let g = coupling(p.g, p.g_phase)?;
    let k_range = p.k_max.map(KRange::Symmetric).unwrap_or(KRange::Auto);
    let spec = match p.engine.as_str() {
        "approx" => spectrum_approx(&state.statistics()?, &g, k_range)?,
        "exact" => {
            let opts = ExactOptions { k_range, joint: false, coherences: false, ..ExactOptions::default() };
            spectrum_exact(&state.build()?, &g, &opts)?.spectrum
        }
        "closed-form" => spectrum_closed_form(state.closed_form()?, &g, k_range)?,
        "oracle" => {
            let built = state.build()?;
            let k = p.k_max.unwrap_or_else(|| qpinem::interaction::auto_k(g.beta(built.mean_photon_number())));
            oracle_spectrum(&built, &g, &OracleOptions::new(k))?.spectrum
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown engine '{other}' (expected exact, approx, closed-form or oracle)"
            )))
        }
    };
    Ok(spec.with_label(&state.family))
}

pub fn run(common: &Common, file: &serde_json::Value, a: Args) -> Result<()> {
    let mut p: Params = section(file, "spectrum")?;
    p.state.overlay(&a.state);
    overlay!(p, a; g, g_phase, engine);
    if a.k_max.is_some() {
        p.k_max = a.k_max;
    }
    if let Some(s) = list::<f64>(&a.sweep, "sweep")? {
        p.sweep = s;
    }

    // a sweep alone is enough to pick the intensity of the single spectrum
    let base = match (p.sweep.first(), p.state.mean()) {
        (Some(m), Err(_)) => p.state.at_mean(*m)?,
        _ => p.state.clone(),
    };
    let spec = compute(&base, &p)?;
    let mut out = Output::new(common);
    match common.format {
        Format::Csv => out.write("spectrum.csv", &spec.to_csv()?)?,
        Format::Json => out.write("spectrum.json", &spec.to_json()?)?,
    }
    say!(
        "{} engine={} |g|={} k in [{}, {}] total={:.12} leakage={:.3e} <k^2>={:.6}",
        p.state.family,
        spec.engine().name(),
        p.g,
        spec.k_min(),
        spec.k_max(),
        spec.total(),
        spec.leakage(),
        spec.moment(2)
    );
    if common.svg {
        let pts: Vec<(f64, f64)> = spec.ks().zip(spec.probs()).map(|(k, v)| (k as f64, *v)).collect();
        out.write("spectrum.svg", &svg::line_chart("Electron spectrum", "k", "P_k", &[(&p.state.family, pts)]))?;
    }

    if !p.sweep.is_empty() {
        let spectra: Vec<ElectronSpectrum<f64>> =
            p.sweep.iter().map(|m| compute(&p.state.at_mean(*m)?, &p)).collect::<Result<_>>()?;
        let rows: Vec<(f64, &ElectronSpectrum<f64>)> = p.sweep.iter().cloned().zip(spectra.iter()).collect();
        out.write("map.csv", &long_csv("mean_n", &rows)?)?;
        if common.svg {
            let refs: Vec<&ElectronSpectrum<f64>> = spectra.iter().collect();
            let (ks, vals) = spectra_matrix(&refs);
            out.write("map.svg", &svg::heatmap("Spectrum vs intensity", "k", "<n>", &ks, &p.sweep, &vals))?;
        }
    }
    out.finish("spectrum", common, &p)
}
