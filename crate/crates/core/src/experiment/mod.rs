//! Finite-electron measurements: sampling, precision sweeps, coupling jitter
//! and single-shot budgets. f64 only.

mod budget;
mod precision;
mod sampling;

pub use budget::{single_shot_budget, BudgetOptions, SingleShotBudget, Verdict};
pub use precision::{jitter_sensitivity, precision_curve, JitterReport, PrecisionReport, DEFAULT_SWEEP};
pub use sampling::{rng_for, sample_spectrum, sample_spectrum_stream, ExperimentConfig};
