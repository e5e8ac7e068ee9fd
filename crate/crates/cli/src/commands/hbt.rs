use serde::{Deserialize, Serialize};

use qpinem::interaction::ElectronSpectrum;
use qpinem::tomography::{coherence_scan, CoherenceOptions, Source};
use qpinem::{Error, Result};

use super::{coupling, spectra_matrix};
use crate::config::{overlay, section, Common};
use crate::output::Output;
use crate::svg;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// coherent or thermal.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    mean_n: Option<f64>,
    /// Δω as a fraction of ω.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    /// Largest delay in units of 1/ω.
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_points: Option<usize>,
    /// Skip the P_k(τ) map.
    #[arg(long)]
    no_spectra: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub source: String,
    pub mean_n: f64,
    pub bandwidth: f64,
    pub g: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    pub spectra: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            source: "coherent".into(),
            mean_n: 100.0,
            bandwidth: 0.1,
            g: 0.1,
            tau_max: 60.0,
            tau_points: 121,
            spectra: true,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    g2_at_zero: f64,
    g2_at_max_delay: f64,
    long_delay_limit: f64,
    g2_min: f64,
    g2_total_variation: f64,
}

pub fn run(common: &Common, file: &serde_json::Value, a: Args) -> Result<()> {
    let mut p: Params = section(file, "hbt")?;
    overlay!(p, a; source, mean_n, bandwidth, g, tau_max, tau_points);
    if a.no_spectra {
        p.spectra = false;
    }
    if p.tau_points < 2 || !(p.tau_max > 0.0) {
        return Err(Error::invalid("need --tau-points >= 2 and --tau-max > 0"));
    }
    let source: Source = p.source.parse()?;
    let g = coupling(p.g, 0.0)?;
    let taus: Vec<f64> = (0..p.tau_points).map(|i| p.tau_max * i as f64 / (p.tau_points - 1) as f64).collect();
    let res = coherence_scan(source, p.mean_n, p.bandwidth, &g, &taus, &CoherenceOptions { spectra: p.spectra })?;

    let mut out = Output::new(common);
    out.write("g_curves.csv", &res.to_csv()?)?;
    if p.spectra {
        out.write("spectra_map.csv", &res.spectra_csv()?)?;
    }
    let summary = Summary {
        g2_at_zero: res.g2_mod[0],
        g2_at_max_delay: *res.g2_mod.last().unwrap_or(&f64::NAN),
        long_delay_limit: 2.0 * (1.0 - 1.0 / p.mean_n),
        g2_min: res.g2_mod.iter().cloned().fold(f64::INFINITY, f64::min),
        g2_total_variation: res.g2_total_variation(),
    };
    out.write("summary.json", &serde_json::to_string_pretty(&summary)?)?;
    if common.svg {
        let s1: Vec<(f64, f64)> = taus.iter().cloned().zip(res.g1_mod.iter().cloned()).collect();
        let s2: Vec<(f64, f64)> = taus.iter().cloned().zip(res.g2_mod.iter().cloned()).collect();
        out.write(
            "g_curves.svg",
            &svg::line_chart("Modified coherence", "tau", "value", &[("g1_mod", s1), ("g2_mod", s2)]),
        )?;
        if p.spectra {
            let refs: Vec<&ElectronSpectrum<f64>> = res.spectra.iter().collect();
            let (ks, vals) = spectra_matrix(&refs);
            out.write("spectra_map.svg", &svg::heatmap("P_k(tau)", "k", "tau", &ks, &taus, &vals))?;
        }
    }
    say!(
        "{} g2(0)={:.9} g2(tau_max)={:.9} limit={:.9}",
        p.source,
        summary.g2_at_zero,
        summary.g2_at_max_delay,
        summary.long_delay_limit
    );
    out.finish("hbt", common, &p)
}
