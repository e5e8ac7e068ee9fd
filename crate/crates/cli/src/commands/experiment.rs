use serde::{Deserialize, Serialize};

use qpinem::experiment::{
    jitter_sensitivity, precision_curve, sample_spectrum_stream, single_shot_budget, BudgetOptions, ExperimentConfig,
    DEFAULT_SWEEP,
};
use qpinem::fockspace::statistics;
use qpinem::interaction::{spectrum_approx, KRange};
use qpinem::io::fmt_f64;
use qpinem::{Error, Result};

use super::{coupling, list};
use crate::config::{overlay, section, Common, Format};
use crate::output::Output;
use crate::state::{StateArgs, StateSpec};
use crate::svg;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    g: Option<f64>,
    /// Anchor electron count, added to the sweep and reported.
    #[arg(long)]
    electrons: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Relative standard deviation of |g| per realization.
    #[arg(long)]
    g_jitter: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated electron counts.
    #[arg(long)]
    sweep: Option<String>,
    /// Comma-separated relative coupling errors.
    #[arg(long)]
    jitter_grid: Option<String>,
    /// Target relative error on ⟨n⟩ for the single-shot budget.
    #[arg(long)]
    target: Option<f64>,
    /// all, precision, jitter or single-shot.
    #[arg(long)]
    mode: Option<String>,
    /// Electrons traced through the back-action drift check.
    #[arg(long)]
    trace_electrons: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub state: StateSpec,
    pub g: f64,
    pub electrons: usize,
    pub realizations: usize,
    pub g_jitter: f64,
    pub order: usize,
    pub sweep: Vec<usize>,
    pub jitter_grid: Vec<f64>,
    pub target: f64,
    pub mode: String,
    pub trace_electrons: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            state: StateSpec { mean_n: Some(900.0), ..StateSpec::default() },
            g: 0.1,
            electrons: 1000,
            realizations: 100,
            g_jitter: 0.0,
            order: 3,
            sweep: DEFAULT_SWEEP.to_vec(),
            jitter_grid: (-5..=5).map(|i| i as f64 * 0.01).collect(),
            target: 0.05,
            mode: "all".into(),
            trace_electrons: BudgetOptions::default().trace_electrons,
        }
    }
}

pub fn run(common: &Common, file: &serde_json::Value, a: Args) -> Result<()> {
    let mut p: Params = section(file, "experiment")?;
    p.state.overlay(&a.state);
    overlay!(p, a; g, electrons, realizations, g_jitter, order, target, mode, trace_electrons);
    if let Some(s) = list::<usize>(&a.sweep, "sweep")? {
        p.sweep = s;
    }
    if let Some(j) = list::<f64>(&a.jitter_grid, "jitter-grid")? {
        p.jitter_grid = j;
    }
    let (do_prec, do_jit, do_shot) = match p.mode.as_str() {
        "all" => (true, true, true),
        "precision" => (true, false, false),
        "jitter" => (false, true, false),
        "single-shot" => (false, false, true),
        other => return Err(Error::invalid(format!("unknown mode '{other}' (all, precision, jitter, single-shot)"))),
    };
    let g = coupling(p.g, 0.0)?;
    let state = p.state.build()?;
    let mut out = Output::new(common);

    if do_prec {
        let config = ExperimentConfig {
            electrons: p.electrons,
            realizations: p.realizations,
            g,
            g_jitter: p.g_jitter,
            seed: common.seed,
        };
        config.validate()?;
        let mut sweep = p.sweep.clone();
        sweep.push(p.electrons);
        sweep.sort_unstable();
        sweep.dedup();
        let mut report = precision_curve(&state, &config, p.order, &sweep)?;
        // one histogram per sweep point, drawn from the first realization's stream
        let spec = spectrum_approx(&statistics(&state), &g, KRange::Auto)?;
        let mut archive = String::from("N,k,probability\n");
        for (i, &n) in sweep.iter().enumerate() {
            let h = sample_spectrum_stream(&spec, n, common.seed, (i as u64) << 32)?;
            for (k, q) in h.ks().zip(h.probs()) {
                archive.push_str(&format!("{n},{k},{}\n", fmt_f64(*q)));
            }
        }
        out.write("samples.csv", &archive)?;
        report.archive = Some("samples.csv".into());
        match common.format {
            Format::Json => out.write("precision.json", &report.to_json()?)?,
            Format::Csv => {
                out.write("precision.csv", &report.to_csv()?)?;
                out.write("precision.json", &report.to_json()?)?;
            }
        }
        if common.svg {
            let series: Vec<(String, Vec<(f64, f64)>)> = (0..p.order)
                .map(|m| {
                    let pts = report
                        .electrons
                        .iter()
                        .zip(&report.deviations)
                        .filter(|(_, d)| d[m] > 0.0)
                        .map(|(n, d)| ((*n as f64).log10(), d[m].log10()))
                        .collect();
                    (format!("m={}", m + 1), pts)
                })
                .collect();
            let refs: Vec<(&str, Vec<(f64, f64)>)> = series.iter().map(|(s, v)| (s.as_str(), v.clone())).collect();
            out.write("precision.svg", &svg::line_chart("Moment precision", "log10 N", "log10 rel. error", &refs))?;
        }
        let exps: Vec<String> = report.exponents.iter().map(|e| format!("{e:.3}")).collect();
        let at = sweep.iter().position(|n| *n == p.electrons).unwrap_or(0);
        let anchor: Vec<String> = report.deviations[at].iter().map(|d| format!("{:.2}%", 100.0 * d)).collect();
        say!(
            "precision: N={} rel dev [{}], exponents [{}], failures {:?}",
            p.electrons,
            anchor.join(", "),
            exps.join(", "),
            report.failures
        );
    }

    if do_jit {
        let report = jitter_sensitivity(&state, &g, &p.jitter_grid, p.order)?;
        out.write("jitter.json", &report.to_json()?)?;
        if common.format == Format::Csv {
            out.write("jitter.csv", &report.to_csv()?)?;
        }
        let slopes: Vec<String> = report.slopes.iter().map(|s| format!("{s:.3}")).collect();
        say!("jitter: slopes [{}]", slopes.join(", "));
    }

    if do_shot {
        let opts = BudgetOptions { trace_electrons: p.trace_electrons };
        let b = single_shot_budget(&state, &g, p.target, p.order, &opts)?;
        out.write("single_shot.json", &b.to_json()?)?;
        say!("single-shot: N_e={} verdict={:?}", b.electrons_needed, b.verdict);
    }
    out.finish("experiment", common, &p)
}
