use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Complex coupling constant g = |g| e^{iφ} of one interaction point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling<T> {
    magnitude: T,
    phase: T,
}

impl<T: Real> Coupling<T> {
    pub fn new(magnitude: T, phase: T) -> Result<Self> {
        if !(magnitude >= T::zero()) || !magnitude.is_finite() || !phase.is_finite() {
            return Err(Error::invalid(format!("coupling magnitude {magnitude} must be finite and non-negative")));
        }
        Ok(Coupling { magnitude, phase })
    }

    /// Real positive coupling; panics on negative input.
    pub fn real(magnitude: T) -> Self {
        Self::new(magnitude, T::zero()).expect("non-negative coupling")
    }

    pub fn magnitude(&self) -> T {
        self.magnitude
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    pub fn value(&self) -> Complex<T> {
        Complex::from_polar(self.magnitude, self.phase)
    }

    /// e^{iφ}
    pub fn unit(&self) -> Complex<T> {
        Complex::from_polar(T::one(), self.phase)
    }

    /// Classical interaction strength β = |g|√⟨n⟩.
    pub fn beta(&self, mean_n: T) -> T {
        self.magnitude * mean_n.max(T::zero()).sqrt()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Coupling { magnitude: self.magnitude * factor, phase: self.phase }
    }
}

/// Single-mode equivalent of N identical independent interaction points:
/// coupling √N g acting on the collective mode (a_1 + … + a_N)/√N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedCoupling<T> {
    pub coupling: Coupling<T>,
    pub points: usize,
}

pub fn compose_interactions<T: Real>(g: Coupling<T>, points: usize) -> Result<ComposedCoupling<T>> {
    if points == 0 {
        return Err(Error::invalid("at least one interaction point is required"));
    }
    Ok(ComposedCoupling { coupling: g.scaled(T::of(points).sqrt()), points })
}
