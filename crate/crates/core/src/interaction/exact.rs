use num_complex::Complex;
use rayon::prelude::*;

use super::approx::auto_k;
use super::coupling::Coupling;
use super::spectrum::{ElectronSpectrum, Engine, InteractionOutcome, JointDistribution, KRange};
use super::SPEC_TOL;
use crate::fockspace::{CMatrix, Density, PhotonicState};
use crate::special::displacement_column;
use crate::{Error, Real, Result};

/// Options for the exact engine.
#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub k_range: KRange,
    /// Allowed probability outside the ladder window.
    pub spec_tol: f64,
    /// Keep the joint table P_{n,k}.
    pub joint: bool,
    /// Propagate coherences of a dense input into the traced-out state.
    pub coherences: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { k_range: KRange::Auto, spec_tol: SPEC_TOL, joint: true, coherences: true }
    }
}

/// ⟨n−k|S|n⟩ on the photon mode, with the electron moved k rungs up.
/// Zero when n − k < 0.
pub fn amplitude_exact<T: Real>(n: usize, k: i64, g: &Coupling<T>) -> Result<Complex<T>> {
    let x = g.magnitude() * g.magnitude();
    let a = k.unsigned_abs() as usize;
    let (f, phase) = if k >= 0 {
        if (k as usize) > n {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let col = displacement_column(x, a, n - a + 1);
        (col[n - a], (-g.unit().conj()).powu(a as u32))
    } else {
        let col = displacement_column(x, a, n + 1);
        (col[n], g.unit().powu(a as u32))
    };
    if !f.is_finite() {
        return Err(Error::numerical(format!("amplitude n={n} k={k} is not finite")));
    }
    Ok(phase * f)
}

/// Real moduli f_j of the amplitudes at ladder shift k, indexed by j = min(n_i, n_f).
/// n_i = j + k, n_f = j for k ≥ 0; n_i = j, n_f = j + |k| for k < 0.
pub(crate) fn shift_columns<T: Real>(x: T, n_len: usize, k_half: usize) -> Vec<Vec<T>> {
    let ks: Vec<i64> = (-(k_half as i64)..=k_half as i64).collect();
    ks.par_iter()
        .map(|&k| {
            let a = k.unsigned_abs() as usize;
            if k >= 0 {
                if a >= n_len {
                    Vec::new()
                } else {
                    displacement_column(x, a, n_len - a)
                }
            } else {
                displacement_column(x, a, n_len)
            }
        })
        .collect()
}

/// P_k, leakage and boundary weight for a fixed window; used by the auto-K loop.
fn exact_probs<T: Real>(p: &[T], cols: &[Vec<T>], k_half: usize) -> Vec<T> {
    cols.par_iter()
        .enumerate()
        .map(|(i, f)| {
            let k = i as i64 - k_half as i64;
            let off_i = if k >= 0 { k as usize } else { 0 };
            f.iter().enumerate().map(|(j, fj)| p[j + off_i] * *fj * *fj).sum::<T>()
        })
        .collect()
}

pub(crate) struct WindowCheck {
    pub leakage: f64,
    pub boundary: f64,
}

pub(crate) fn check_window<T: Real>(mass: T, probs: &[T]) -> WindowCheck {
    let total: T = probs.iter().cloned().sum();
    let leakage = (mass - total).max(T::zero()).f64();
    let boundary = probs.first().unwrap().f64().max(probs.last().unwrap().f64());
    WindowCheck { leakage, boundary }
}

/// Leakage test; the tolerance is floored at what the scalar type can resolve.
pub(crate) fn window_ok<T: Real>(c: &WindowCheck, tol: f64) -> bool {
    let tol = tol.max(1e3 * T::epsilon().f64());
    c.leakage < tol && c.boundary < tol / 10.0
}

/// Largest window tried before giving up.
pub(crate) fn k_limit(n_len: usize, beta: f64) -> usize {
    (8 * n_len).max(64) + (40.0 * beta) as usize
}

/// Full electron spectrum, joint table and traced-out photon state.
pub fn spectrum_exact<T: Real>(
    state: &PhotonicState<T>,
    g: &Coupling<T>,
    opts: &ExactOptions,
) -> Result<InteractionOutcome<T>> {
    let p = state.diagonal();
    let n_len = p.len();
    let mass: T = p.iter().cloned().sum();
    let x = g.magnitude() * g.magnitude();
    let beta = g.beta(state.mean_photon_number()).f64();
    let mut k_half = match opts.k_range {
        KRange::Auto => auto_k(beta),
        KRange::Symmetric(k) => k,
    };
    let (cols, probs, check) = loop {
        let cols = shift_columns(x, n_len, k_half);
        let probs = exact_probs(&p, &cols, k_half);
        if probs.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("exact spectrum produced a non-finite value"));
        }
        let check = check_window(mass, &probs);
        if window_ok::<T>(&check, opts.spec_tol) {
            break (cols, probs, check);
        }
        match opts.k_range {
            KRange::Auto if k_half < k_limit(n_len, beta) => k_half *= 2,
            _ => {
                return Err(Error::Leakage {
                    k_max: k_half,
                    leakage: check.leakage.max(check.boundary),
                    tol: opts.spec_tol,
                })
            }
        }
    };
    let k_min = -(k_half as i64);
    let n_out = n_len + k_half;

    let mut joint = if opts.joint { Some(JointDistribution::zeros(n_out, k_min, 2 * k_half + 1)) } else { None };
    let mut diag = vec![T::zero(); n_out];
    for (i, f) in cols.iter().enumerate() {
        let k = i as i64 + k_min;
        let (off_i, off_f) = if k >= 0 { (k as usize, 0) } else { (0, k.unsigned_abs() as usize) };
        for (j, fj) in f.iter().enumerate() {
            let w = p[j + off_i] * *fj * *fj;
            diag[j + off_f] += w;
            if let Some(jd) = joint.as_mut() {
                jd.add(j + off_f, k, w);
            }
        }
    }

    let leak = T::lit(check.leakage);
    let density = match state.density() {
        Density::Dense(rho) if opts.coherences => Density::Dense(dense_post_state(rho, &cols, k_half, n_out)),
        _ => Density::Diagonal(diag),
    };
    let post = PhotonicState::built(density, state.label(), state.tail_mass() + leak);
    let spectrum = ElectronSpectrum::raw(k_min, probs, leak, Engine::Exact, *g).with_label(state.label());
    Ok(InteractionOutcome { spectrum, post_state_traced: post, joint })
}

/// ρ' = Σ_k M_k ρ M_k†. The phases of M_k are common to a whole k-block and
/// cancel, so only the real moduli enter.
fn dense_post_state<T: Real>(rho: &CMatrix<T>, cols: &[Vec<T>], k_half: usize, n_out: usize) -> CMatrix<T> {
    let mut out = CMatrix::zeros(n_out);
    for (i, f) in cols.iter().enumerate() {
        let k = i as i64 - k_half as i64;
        let (off_i, off_f) = if k >= 0 { (k as usize, 0) } else { (0, k.unsigned_abs() as usize) };
        for (j1, f1) in f.iter().enumerate() {
            if *f1 == T::zero() {
                continue;
            }
            let row = rho.row(j1 + off_i);
            for (j2, f2) in f.iter().enumerate() {
                let v = row[j2 + off_i] * (*f1 * *f2);
                out.add_at(j1 + off_f, j2 + off_f, v);
            }
        }
    }
    out
}
