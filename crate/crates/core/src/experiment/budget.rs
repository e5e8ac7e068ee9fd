use serde::Serialize;

use crate::fockspace::{quadrature_variance, statistics, PhotonicState};
use crate::interaction::{spectrum_approx, traced_back_action, Coupling, KRange};
use crate::reconstruction::build_kernel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Target precision is reached before the back-action exceeds the
    /// state's own quadrature variance.
    NonDestructive,
    DestructiveOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct BudgetOptions {
    /// Electrons traced through the exact engine for the statistics drift;
    /// the drift is reported at this count and at half of it.
    pub trace_electrons: usize,
}

impl Default for BudgetOptions {
    fn default() -> Self {
        BudgetOptions { trace_electrons: 16 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleShotBudget {
    pub electrons_needed: usize,
    /// Single-electron standard deviation of the ⟨n⟩ estimator, relative to ⟨n⟩.
    pub sigma_rel: f64,
    pub target: f64,
    /// |g|√⟨n⟩, with `regime_ok` when it is at least of order one.
    pub beta: f64,
    pub regime_ok: bool,
    /// Predicted quadrature-variance growth N_e|g|²/2.
    pub quadrature_growth: f64,
    /// Smallest quadrature variance of the input state.
    pub state_variance: f64,
    /// (electrons, max_n |p'_n − p_n|) from the sequential trace-out.
    pub drift: Vec<(usize, f64)>,
    pub drift_sublinear: bool,
    pub verdict: Verdict,
}

impl SingleShotBudget {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Electrons needed for a mean absolute relative error `target` on ⟨n⟩ and
/// the back-action that many electrons cause.
pub fn single_shot_budget(
    state: &PhotonicState<f64>,
    g: &Coupling<f64>,
    target: f64,
    order: usize,
    opts: &BudgetOptions,
) -> Result<SingleShotBudget> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!("target relative error must lie in (0, 1) (got {target})")));
    }
    let stats = statistics(state);
    let mean = stats.mean();
    if !(mean > 0.0) {
        return Err(Error::invalid("the budget needs ⟨n⟩ > 0"));
    }
    let spec = spectrum_approx(&stats, g, KRange::Auto)?;
    let kernel = build_kernel(g, order.max(1), (spec.k_max() as usize).max(order.max(1)))?;
    // one electron contributes d_1k at its k > 0, zero otherwise
    let (mut m1, mut m2) = (0.0, 0.0);
    for k in 1..=kernel.peaks() {
        let p = spec.get(k as i64);
        let d = kernel.d(1, k);
        m1 += d * p;
        m2 += d * d * p;
    }
    let sigma_rel = (m2 - m1 * m1).max(0.0).sqrt() / mean;
    // E|Z| = σ√(2/π) for the Gaussian limit of the N-electron average
    let needed = (sigma_rel * (2.0 / std::f64::consts::PI).sqrt() / target).powi(2).ceil().max(1.0) as usize;

    let beta = g.beta(mean);
    let growth = needed as f64 * g.magnitude().powi(2) / 2.0;
    let state_variance = (0..16)
        .map(|i| quadrature_variance(state, std::f64::consts::PI * i as f64 / 16.0))
        .fold(f64::INFINITY, f64::min);

    let mut drift = Vec::new();
    let mut sublinear = true;
    let n_trace = opts.trace_electrons.min(needed);
    if n_trace >= 1 {
        let trace = traced_back_action(state, g, n_trace)?;
        let half = (n_trace / 2).max(1);
        drift.push((half, trace.deviations[half - 1]));
        if n_trace > half {
            drift.push((n_trace, trace.deviations[n_trace - 1]));
            sublinear = trace.deviations[n_trace - 1] < 2.0 * trace.deviations[half - 1];
        }
    }

    Ok(SingleShotBudget {
        electrons_needed: needed,
        sigma_rel,
        target,
        beta,
        regime_ok: beta >= 0.5,
        quadrature_growth: growth,
        state_variance,
        drift,
        drift_sublinear: sublinear,
        verdict: if growth > state_variance { Verdict::DestructiveOnly } else { Verdict::NonDestructive },
    })
}
