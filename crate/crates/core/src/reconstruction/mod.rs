//! Inverse pipeline: electron spectrum → photon-number moments and statistics.

mod kernel;
mod ladder;
mod moments;
mod statistics_fit;

pub use kernel::{build_kernel, MomentKernel};
pub use ladder::{ladder_moments, ladder_polynomials};
pub use moments::{moments_from_spectrum, MomentEstimate, MomentStatus, PeakPolicy};
pub use statistics_fit::{kernel_matrix, statistics_from_spectrum, FitOptions, StatisticsFit};
