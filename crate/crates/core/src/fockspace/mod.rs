//! Quantum states of light in a truncated Fock basis.

mod constructors;
mod matrix;
mod phase_space;
mod state;
mod statistics;

pub use constructors::{
    coherent_cutoff, make_cat, make_coherent, make_fock, make_mixed_pair, make_squeezed, make_thermal,
    squeezed_amplitudes, thermal_cutoff, Parity,
};
pub use matrix::CMatrix;
pub use phase_space::{
    default_grid, quadrature_distribution, quadrature_moments, quadrature_variance, wigner, wigner_default,
    GridWarning, PhaseAxes, WignerGrid, WignerOutcome,
};
pub use state::{Density, PhotonicState, StateRecord};
pub use statistics::{moments, statistics, MomentVector, PhotonStatistics};

/// Default bound on the probability discarded by truncating the Fock basis.
pub const TAIL_TOL: f64 = 1e-10;
