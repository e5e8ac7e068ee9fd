use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qpinem::interaction::{ElectronSpectrum, Engine};
use qpinem::reconstruction::{
    build_kernel, ladder_moments, moments_from_spectrum, statistics_from_spectrum, FitOptions, PeakPolicy,
};
use qpinem::{Error, Result};

use super::coupling;
use super::spectrum::{compute, Params as SpectrumParams};
use crate::config::{overlay, section, Common};
use crate::output::Output;
use crate::state::{StateArgs, StateSpec};
use crate::svg;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Spectrum CSV (`k,probability`) or JSON; without it the forward model is used.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    g: Option<f64>,
    /// Forward-model engine when no input is given.
    #[arg(long)]
    engine: Option<String>,
    /// Highest moment M.
    #[arg(long)]
    order: Option<usize>,
    /// Peak-count remainder tolerance.
    #[arg(long)]
    rtol: Option<f64>,
    /// Peaks at or below this probability are ignored.
    #[arg(long)]
    noise_floor: Option<f64>,
    /// kernel (Bessel regime) or ladder (exact amplitudes).
    #[arg(long)]
    method: Option<String>,
    /// Largest photon number of the statistics fit support.
    #[arg(long)]
    support_max: Option<usize>,
    #[arg(long)]
    support_step: Option<usize>,
    /// Tikhonov weight; automatic when absent.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub input: Option<PathBuf>,
    pub state: StateSpec,
    pub g: f64,
    pub engine: String,
    pub order: usize,
    pub rtol: f64,
    pub noise_floor: f64,
    pub method: String,
    pub support_max: Option<usize>,
    pub support_step: Option<usize>,
    pub lambda: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        let policy = PeakPolicy::default();
        Params {
            input: None,
            state: StateSpec::default(),
            g: 0.1,
            engine: "approx".into(),
            order: 3,
            rtol: policy.rtol,
            noise_floor: policy.noise_floor,
            method: "kernel".into(),
            support_max: None,
            support_step: None,
            lambda: None,
        }
    }
}

fn load_spectrum(path: &std::path::Path) -> Result<ElectronSpectrum<f64>> {
    let text = qpinem::io::read_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        ElectronSpectrum::from_json(&text)
    } else {
        ElectronSpectrum::from_csv(&text, Engine::Sampled)
    }
}

pub fn run(common: &Common, file: &serde_json::Value, a: Args) -> Result<()> {
    let mut p: Params = section(file, "reconstruct")?;
    p.state.overlay(&a.state);
    overlay!(p, a; g, engine, order, rtol, noise_floor, method);
    if a.input.is_some() {
        p.input = a.input.clone();
    }
    if a.support_max.is_some() {
        p.support_max = a.support_max;
    }
    if a.support_step.is_some() {
        p.support_step = a.support_step;
    }
    if a.lambda.is_some() {
        p.lambda = a.lambda;
    }
    if p.order == 0 {
        return Err(Error::invalid("--order must be >= 1"));
    }

    let g = coupling(p.g, 0.0)?;
    let spec = match &p.input {
        Some(path) => load_spectrum(path)?,
        None => {
            let sp = SpectrumParams {
                state: p.state.clone(),
                g: p.g,
                g_phase: 0.0,
                engine: p.engine.clone(),
                k_max: None,
                sweep: vec![],
            };
            compute(&p.state, &sp)?
        }
    };
    let policy = PeakPolicy { rtol: p.rtol, noise_floor: p.noise_floor };
    let mut out = Output::new(common);
    let moments: Vec<f64> = match p.method.as_str() {
        "kernel" => {
            let kernel = build_kernel(&g, p.order, (spec.k_max().max(p.order as i64)) as usize)?;
            let est = moments_from_spectrum(&spec, &kernel, &policy)?;
            out.write("moments.json", &est.to_json()?)?;
            est.moments.values().to_vec()
        }
        "ladder" => {
            let m = ladder_moments(&spec, &g, p.order)?;
            let rec = serde_json::json!({ "moments": m.values(), "method": "ladder", "g": p.g, "M": p.order });
            out.write("moments.json", &serde_json::to_string_pretty(&rec)?)?;
            m.values().to_vec()
        }
        other => return Err(Error::invalid(format!("unknown method '{other}' (expected kernel or ladder)"))),
    };
    let mean = moments[0];
    let var = if moments.len() > 1 { (moments[1] - mean * mean).max(0.0) } else { mean.max(0.0) };
    let sd = var.sqrt();
    say!("moments: {moments:?}  mean={mean:.6} variance={var:.6}");

    let hi = p.support_max.unwrap_or((mean + 6.0 * sd + 3.0).ceil().max(1.0) as usize);
    let lo = if p.support_max.is_some() { 0 } else { (mean - 6.0 * sd).floor().max(0.0) as usize };
    let step = p.support_step.unwrap_or(((sd / 10.0).floor() as usize).max(1));
    let support: Vec<usize> = (lo..=hi).step_by(step.max(1)).collect();
    let fit = statistics_from_spectrum(&spec, &g, &support, &FitOptions { lambda: p.lambda, ..FitOptions::default() })?;
    out.write("statistics.csv", &fit.to_csv()?)?;
    if common.svg {
        let pts: Vec<(f64, f64)> = fit.support.iter().zip(&fit.weights).map(|(n, w)| (*n as f64, *w)).collect();
        out.write("statistics.svg", &svg::line_chart("Photon statistics", "n", "p_n", &[("fit", pts)]))?;
    }
    out.finish("reconstruct", common, &p)
}
