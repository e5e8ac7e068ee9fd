use serde::{Deserialize, Serialize};

use qpinem::fockspace::{default_grid, quadrature_moments, wigner};
use qpinem::interaction::Engine;
use qpinem::io::fmt_f64;
use qpinem::tomography::{
    homodyne_scan, inverse_radon, quadrature_from_scan, scan_kernel, uniform_thetas, wigner_csv, wigner_metadata,
    QuadratureOptions, ScanOptions,
};
use qpinem::{Error, Result};

use super::coupling;
use crate::config::{overlay, section, Common};
use crate::output::Output;
use crate::state::{StateArgs, StateSpec};
use crate::svg;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    state: StateArgs,
    /// Number of LO phases over [0, π).
    #[arg(long)]
    angles: Option<usize>,
    /// |α_LO|² / max(⟨n⟩, 1).
    #[arg(long)]
    lo_ratio: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    /// Quadrature moment order M.
    #[arg(long)]
    order: Option<usize>,
    /// x-grid points for the quadrature densities.
    #[arg(long)]
    grid_points: Option<usize>,
    /// approx or exact two-point engine.
    #[arg(long)]
    engine: Option<String>,
    /// Second state family for a difference map (same α), e.g. mixed.
    #[arg(long)]
    compare: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub state: StateSpec,
    pub angles: usize,
    pub lo_ratio: f64,
    pub g: f64,
    pub order: usize,
    pub grid_points: usize,
    pub engine: String,
    pub compare: Option<String>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            state: StateSpec::default(),
            angles: 40,
            lo_ratio: 100.0,
            g: 0.1,
            order: 2,
            grid_points: 201,
            engine: "approx".into(),
            compare: None,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    angles: usize,
    lo_intensity: f64,
    wigner_linf_error: f64,
    wigner_peak: f64,
    wigner_relative_error: f64,
    wigner_integral: f64,
    max_mean_error: f64,
    max_variance_rel_error: f64,
    max_difference: Option<f64>,
}

pub fn run(common: &Common, file: &serde_json::Value, a: Args) -> Result<()> {
    let mut p: Params = section(file, "tomography")?;
    p.state.overlay(&a.state);
    overlay!(p, a; angles, lo_ratio, g, order, grid_points, engine);
    if a.compare.is_some() {
        p.compare = a.compare.clone();
    }
    let engine = match p.engine.as_str() {
        "approx" => Engine::Approx,
        "exact" => Engine::Exact,
        other => return Err(Error::invalid(format!("unknown engine '{other}' (expected approx or exact)"))),
    };
    let g = coupling(p.g, 0.0)?;
    let state = p.state.build()?;
    let thetas = uniform_thetas(p.angles);
    let opts = ScanOptions { engine, ..ScanOptions::default() };
    let scan = homodyne_scan(&state, p.lo_ratio, &g, &thetas, &opts)?;
    let mut out = Output::new(common);
    out.write("scan.csv", &scan.to_csv()?)?;

    let kernel = scan_kernel(&scan, p.order)?;
    let qopts = QuadratureOptions { grid_points: p.grid_points, ..QuadratureOptions::default() };
    let quads = quadrature_from_scan(&scan, &kernel, p.order, &qopts)?;
    let mut dens = String::from("theta,x,density\n");
    let mut moms = String::from("theta,m,moment\n");
    let (mut mean_err, mut var_err) = (0.0f64, 0.0f64);
    for q in &quads {
        for (x, d) in q.x_grid.iter().zip(&q.density) {
            dens.push_str(&format!("{},{},{}\n", fmt_f64(q.theta), fmt_f64(*x), fmt_f64(*d)));
        }
        for (m, v) in q.moments.iter().enumerate() {
            moms.push_str(&format!("{},{},{}\n", fmt_f64(q.theta), m + 1, fmt_f64(*v)));
        }
        let (mean, second) = quadrature_moments(&state, q.theta);
        let var = second - mean * mean;
        mean_err = mean_err.max((q.mean() - mean).abs());
        var_err = var_err.max(((q.variance() - var) / var).abs());
    }
    out.write("quadratures.csv", &dens)?;
    out.write("quadrature_moments.csv", &moms)?;

    let axes = default_grid(&state);
    let rec = if p.angles >= 20 { Some(inverse_radon(&quads, &axes)?) } else { None };
    let (mut linf, mut peak, mut integral) = (f64::NAN, f64::NAN, f64::NAN);
    if let Some(rec) = &rec {
        let truth = wigner(&state, &axes).grid;
        linf = rec.max_abs_diff(&truth);
        peak = truth.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        integral = rec.integral();
        out.write("wigner.csv", &wigner_csv(rec)?)?;
        out.write("wigner.json", &wigner_metadata(rec, p.angles)?)?;
        if common.svg {
            let vals: Vec<Vec<f64>> =
                (0..axes.p.len()).map(|j| (0..axes.x.len()).map(|i| rec.get(i, j)).collect()).collect();
            out.write("wigner.svg", &svg::heatmap("Reconstructed Wigner function", "x", "p", &axes.x, &axes.p, &vals))?;
        }
    } else {
        eprintln!("note: {} angles; the Wigner reconstruction needs at least 20", p.angles);
    }

    let mut max_diff = None;
    if let Some(family) = &p.compare {
        let mut other = p.state.clone();
        other.family = family.clone();
        let other_scan = homodyne_scan(&other.build()?, p.lo_ratio, &g, &thetas, &opts)?;
        let diff = scan.difference(&other_scan)?;
        let k_lo =
            scan.spectra.iter().zip(&other_scan.spectra).map(|(a, b)| a.k_min().min(b.k_min())).collect::<Vec<_>>();
        let mut csv = String::from("theta,k,delta\n");
        let mut m = 0.0f64;
        for ((t, row), lo) in thetas.iter().zip(&diff).zip(&k_lo) {
            for (i, d) in row.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", fmt_f64(*t), lo + i as i64, fmt_f64(*d)));
                m = m.max(d.abs());
            }
        }
        out.write("difference.csv", &csv)?;
        max_diff = Some(m);
    }

    if common.svg {
        let width: Vec<(f64, f64)> = thetas.iter().cloned().zip(scan.k_second_moment()).collect();
        out.write(
            "scan.svg",
            &svg::line_chart("Spectral width vs LO phase", "theta", "sum k^2 P_k", &[("scan", width)]),
        )?;
    }

    let summary = Summary {
        angles: p.angles,
        lo_intensity: scan.lo_intensity(),
        wigner_linf_error: linf,
        wigner_peak: peak,
        wigner_relative_error: linf / peak,
        wigner_integral: integral,
        max_mean_error: mean_err,
        max_variance_rel_error: var_err,
        max_difference: max_diff,
    };
    out.write("summary.json", &serde_json::to_string_pretty(&summary)?)?;
    say!(
        "angles={} wigner L∞/peak={:.4} integral={:.5} max|Δ<X>|={:.3e} max rel ΔVar={:.3e}",
        p.angles,
        summary.wigner_relative_error,
        integral,
        mean_err,
        var_err
    );
    out.finish("tomography", common, &p)
}
