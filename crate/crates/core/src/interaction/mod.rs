//! Electron-light scattering on the energy ladder: exact and Bessel-kernel
//! engines, closed forms, back-action, two-point (local oscillator) interaction
//! and a brute-force matrix-exponential oracle.

mod approx;
mod backaction;
mod closed_form;
mod coupling;
mod exact;
pub mod oracle;
mod spectrum;
mod two_point;

pub use approx::{auto_k, spectrum_approx, trace_out_approx};
pub use backaction::{postselect_state, quadrature_growth, traced_back_action, BackActionTrace, QuadratureGrowth};
pub use closed_form::{spectrum_closed_form, squeezed_vacuum_peak, ClosedForm};
pub use coupling::{compose_interactions, ComposedCoupling, Coupling};
pub use exact::{amplitude_exact, spectrum_exact, ExactOptions};
pub use oracle::{oracle_spectrum, oracle_two_mode_spectrum, OracleOptions};
pub use spectrum::{ElectronSpectrum, Engine, InteractionOutcome, JointDistribution, KRange, SpectrumRecord};
pub use two_point::{displaced_state, displaced_statistics, lo_comb, two_point_spectrum, LoOrder, TwoPointOptions};

/// Default bound on probability lost outside the ladder window.
pub const SPEC_TOL: f64 = 1e-8;
