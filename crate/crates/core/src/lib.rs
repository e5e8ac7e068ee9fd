//! Free-electron interaction with quantum light in a truncated Fock basis.
//!
//! The electron enters only through its energy-ladder index `k` (net photons
//! absorbed). Photonic states, spectra and kernels are generic over the scalar
//! type; the `*64` aliases below are what the pipelines and the CLI use.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scalar;
pub mod special;

pub mod experiment;
pub mod fockspace;
pub mod interaction;
pub mod reconstruction;
pub mod tomography;

pub mod io;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::{Complex, Complex64};

pub type PhotonicState64 = fockspace::PhotonicState<f64>;
pub type PhotonicState32 = fockspace::PhotonicState<f32>;
pub type PhotonStatistics64 = fockspace::PhotonStatistics<f64>;
pub type PhotonStatistics32 = fockspace::PhotonStatistics<f32>;
pub type MomentVector64 = fockspace::MomentVector<f64>;
pub type MomentVector32 = fockspace::MomentVector<f32>;
pub type Coupling64 = interaction::Coupling<f64>;
pub type Coupling32 = interaction::Coupling<f32>;
pub type ElectronSpectrum64 = interaction::ElectronSpectrum<f64>;
pub type ElectronSpectrum32 = interaction::ElectronSpectrum<f32>;
pub type JointDistribution64 = interaction::JointDistribution<f64>;
pub type InteractionOutcome64 = interaction::InteractionOutcome<f64>;
pub type MomentKernel64 = reconstruction::MomentKernel<f64>;
pub type MomentKernel32 = reconstruction::MomentKernel<f32>;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
