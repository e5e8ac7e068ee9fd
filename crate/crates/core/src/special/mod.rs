//! Special functions evaluated with bounded recurrences.

mod bessel;
mod gamma;
mod hermite;
mod hypergeometric;
mod laguerre;

pub use bessel::{bessel_i_scaled_seq, bessel_j_seq};
pub use gamma::{ln_binomial, ln_factorial, ln_gamma, ln_odd_double_factorial};
pub use hermite::hermite_functions;
pub use hypergeometric::hyp2f2_series;
pub use laguerre::{displacement_column, displacement_element};
