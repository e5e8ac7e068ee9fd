use rayon::prelude::*;

use super::coupling::Coupling;
use super::exact::{check_window, k_limit, window_ok};
use super::spectrum::{ElectronSpectrum, Engine, KRange};
use super::SPEC_TOL;
use crate::fockspace::PhotonStatistics;
use crate::special::bessel_j_seq;
use crate::{Error, Real, Result};

const CHUNK: usize = 256;

/// Starting half-width of the ladder window for interaction strength β.
pub fn auto_k(beta: f64) -> usize {
    (2.0 * beta + 10.0 * (beta + 1.0).sqrt()).ceil() as usize
}

/// Σ_n p_n J_k(2|g|√n)² on |k| ≤ k_half, reduced in fixed chunk order.
pub(crate) fn bessel_kernel_probs<T: Real>(p: &[T], g_abs: T, k_half: usize) -> Vec<T> {
    let two_g = T::lit(2.0) * g_abs;
    let partial: Vec<Vec<T>> = p
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = vec![T::zero(); k_half + 1];
            for (i, pn) in chunk.iter().enumerate() {
                if *pn == T::zero() {
                    continue;
                }
                let n = c * CHUNK + i;
                let j = bessel_j_seq(two_g * T::of(n).sqrt(), k_half);
                for (a, jk) in acc.iter_mut().zip(j) {
                    *a += *pn * jk * jk;
                }
            }
            acc
        })
        .collect();
    let mut half = vec![T::zero(); k_half + 1];
    for part in partial {
        for (h, v) in half.iter_mut().zip(part) {
            *h += v;
        }
    }
    (-(k_half as i64)..=k_half as i64).map(|k| half[k.unsigned_abs() as usize]).collect()
}

/// Bessel-kernel spectrum; symmetric in k and blind to coherences.
pub fn spectrum_approx<T: Real>(
    stats: &PhotonStatistics<T>,
    g: &Coupling<T>,
    k_range: KRange,
) -> Result<ElectronSpectrum<T>> {
    let p = stats.probs();
    let mass = stats.total();
    let beta = g.beta(stats.mean()).f64();
    let mut k_half = match k_range {
        KRange::Auto => auto_k(beta),
        KRange::Symmetric(k) => k,
    };
    loop {
        let probs = bessel_kernel_probs(p, g.magnitude(), k_half);
        if probs.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("approximate spectrum produced a non-finite value"));
        }
        let check = check_window(mass, &probs);
        if window_ok::<T>(&check, SPEC_TOL) {
            let leak = T::lit(check.leakage);
            return Ok(ElectronSpectrum::raw(-(k_half as i64), probs, leak, Engine::Approx, *g));
        }
        match k_range {
            KRange::Auto if k_half < k_limit(p.len(), beta) => k_half *= 2,
            _ => {
                return Err(Error::Leakage { k_max: k_half, leakage: check.leakage.max(check.boundary), tol: SPEC_TOL })
            }
        }
    }
}

/// Photon statistics after tracing out the electron when the Bessel kernel is
/// taken at face value: p'_n = p_n Σ_{|k|≤K} J_k(2|g|√n)², which is p_n up to
/// the window truncation.
pub fn trace_out_approx<T: Real>(stats: &PhotonStatistics<T>, g: &Coupling<T>, k_half: usize) -> PhotonStatistics<T> {
    let two_g = T::lit(2.0) * g.magnitude();
    let out = stats
        .probs()
        .iter()
        .enumerate()
        .map(|(n, pn)| {
            let j = bessel_j_seq(two_g * T::of(n).sqrt(), k_half);
            let s = j[0] * j[0] + T::lit(2.0) * j[1..].iter().map(|v| *v * *v).sum::<T>();
            *pn * s
        })
        .collect();
    PhotonStatistics::unchecked(out)
}
