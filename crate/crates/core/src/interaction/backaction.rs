use super::coupling::Coupling;
use super::exact::{spectrum_exact, ExactOptions};
use super::spectrum::JointDistribution;
use crate::fockspace::{quadrature_variance, PhotonStatistics, PhotonicState};
use crate::{Error, Real, Result};

/// Tail mass dropped when the growing post-interaction basis is trimmed.
const TRIM_TOL: f64 = 1e-15;

/// Photon statistics conditioned on the electron having absorbed k photons.
pub fn postselect_state<T: Real>(joint: &JointDistribution<T>, k: i64) -> Result<PhotonStatistics<T>> {
    let col = joint.column(k);
    let pk: T = col.iter().cloned().sum();
    if !(pk > T::zero()) {
        return Err(Error::invalid(format!("cannot condition on k = {k}: P_k = 0")));
    }
    Ok(PhotonStatistics::unchecked(col.into_iter().map(|v| v / pk).collect()))
}

/// Statistics after each of N_e electrons, each traced out in turn.
#[derive(Debug, Clone)]
pub struct BackActionTrace<T> {
    /// steps[i] is the photon statistics after i + 1 electrons.
    pub steps: Vec<PhotonStatistics<T>>,
    /// max_n |p_n(after i + 1) − p_n(input)|
    pub deviations: Vec<T>,
    /// max_n |p_n(after i + 1) − p_n(after i)|
    pub step_changes: Vec<T>,
}

fn trimmed_len<T: Real>(p: &[T]) -> usize {
    let mut tail = 0.0;
    let mut len = p.len();
    while len > 1 {
        let v = p[len - 1].f64().max(0.0);
        if tail + v > TRIM_TOL {
            break;
        }
        tail += v;
        len -= 1;
    }
    len
}

fn max_diff<T: Real>(a: &[T], b: &[T]) -> T {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).cloned().unwrap_or(T::zero()) - b.get(i).cloned().unwrap_or(T::zero())).abs())
        .fold(T::zero(), T::max)
}

/// Sequential exact-engine trace-out of N_e electrons.
pub fn traced_back_action<T: Real>(
    state: &PhotonicState<T>,
    g: &Coupling<T>,
    electrons: usize,
) -> Result<BackActionTrace<T>> {
    if electrons == 0 {
        return Err(Error::invalid("at least one electron is required"));
    }
    let input = state.diagonal();
    let mut cur = PhotonicState::from_statistics(&PhotonStatistics::unchecked(input.clone()), state.label());
    let opts = ExactOptions { joint: false, coherences: false, ..ExactOptions::default() };
    let mut trace = BackActionTrace { steps: Vec::new(), deviations: Vec::new(), step_changes: Vec::new() };
    let mut prev = input.clone();
    for _ in 0..electrons {
        let out = spectrum_exact(&cur, g, &opts)?;
        let p = out.post_state_traced.diagonal();
        let p = p[..trimmed_len(&p)].to_vec();
        trace.deviations.push(max_diff(&p, &input));
        trace.step_changes.push(max_diff(&p, &prev));
        trace.steps.push(PhotonStatistics::unchecked(p.clone()));
        cur = PhotonicState::from_statistics(&PhotonStatistics::unchecked(p.clone()), state.label());
        prev = p;
    }
    Ok(trace)
}

/// Quadrature variance before and after N_e electrons: analytic growth
/// N_e|g|²/2 next to the variance of the numerically evolved state.
#[derive(Debug, Clone)]
pub struct QuadratureGrowth<T> {
    pub initial: T,
    /// ΔX² + N_e|g|²/2
    pub predicted: T,
    /// evolved[i]: ΔX² after i + 1 electrons.
    pub evolved: Vec<T>,
}

impl<T: Real> QuadratureGrowth<T> {
    pub fn final_evolved(&self) -> T {
        *self.evolved.last().expect("at least one electron")
    }
}

pub fn quadrature_growth<T: Real>(
    state: &PhotonicState<T>,
    g: &Coupling<T>,
    electrons: usize,
    theta: T,
) -> Result<QuadratureGrowth<T>> {
    if electrons == 0 {
        return Err(Error::invalid("at least one electron is required"));
    }
    let initial = quadrature_variance(state, theta);
    let gm = g.magnitude();
    let predicted = initial + T::of(electrons) * gm * gm / T::lit(2.0);
    let opts = ExactOptions { joint: false, ..ExactOptions::default() };
    let mut cur = state.clone();
    let mut evolved = Vec::with_capacity(electrons);
    for _ in 0..electrons {
        let out = spectrum_exact(&cur, g, &opts)?;
        let post = out.post_state_traced;
        let len = trimmed_len(&post.diagonal());
        cur = post.resized(len);
        evolved.push(quadrature_variance(&cur, theta));
    }
    Ok(QuadratureGrowth { initial, predicted, evolved })
}
