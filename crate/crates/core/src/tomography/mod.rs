//! Free-electron homodyne tomography and the modified coherence functions.
//!
//! All stages here run in f64.

mod coherence;
mod quadrature;
mod radon;
mod scan;

pub use coherence::{coherence_scan, CoherenceOptions, CoherenceResult, Source};
pub use quadrature::{quadrature_from_scan, scan_kernel, DensityMethod, QuadratureDistribution, QuadratureOptions};
pub use radon::{inverse_radon, wigner_csv, wigner_metadata};
pub use scan::{homodyne_scan, uniform_thetas, HomodyneScan, ScanOptions};
