use num_complex::Complex;

use super::approx::{auto_k, spectrum_approx};
use super::coupling::Coupling;
use super::exact::{check_window, k_limit, shift_columns, window_ok};
use super::spectrum::{ElectronSpectrum, Engine, KRange};
use super::SPEC_TOL;
use crate::fockspace::{coherent_cutoff, CMatrix, Density, PhotonStatistics, PhotonicState};
use crate::special::{bessel_j_seq, displacement_column};
use crate::{Error, Real, Result};

/// Which interaction point the electron meets first. The two stages commute
/// in the ladder model, so both orders give the same spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoOrder {
    #[default]
    LoFirst,
    QuantumFirst,
}

#[derive(Debug, Clone, Copy)]
pub struct TwoPointOptions {
    /// `Engine::Exact` or `Engine::Approx`.
    pub engine: Engine,
    pub order: LoOrder,
    pub k_range: KRange,
}

impl Default for TwoPointOptions {
    fn default() -> Self {
        TwoPointOptions { engine: Engine::Approx, order: LoOrder::LoFirst, k_range: KRange::Auto }
    }
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Classical PINEM amplitudes c_l, l = −L..=L, imprinted by a c-number field α
/// through exp(g α* b − g* α b†): c_l = J_l(2|gα|) (−g*α/|gα|)^l.
pub fn lo_comb<T: Real>(alpha: Complex<T>, g: &Coupling<T>, l_half: usize) -> Vec<Complex<T>> {
    let r = g.magnitude() * alpha.norm();
    let j = bessel_j_seq(T::lit(2.0) * r, l_half);
    let u = if r > T::zero() { -(g.value().conj() * alpha) / r } else { Complex::new(T::one(), T::zero()) };
    (-(l_half as i64)..=l_half as i64)
        .map(|l| {
            let a = l.unsigned_abs() as usize;
            if l >= 0 {
                u.powu(a as u32) * j[a]
            } else {
                // J_{−a} = (−1)^a J_a and u^{−a} = conj(u)^a
                (-u.conj()).powu(a as u32) * j[a]
            }
        })
        .collect()
}

/// ⟨m|D(α)|n⟩ for m < rows, n < cols.
fn displacement_table<T: Real>(alpha: Complex<T>, rows: usize, cols: usize) -> Vec<Vec<Complex<T>>> {
    let r = alpha.norm();
    let mut d = vec![vec![czero::<T>(); cols]; rows];
    if r == T::zero() {
        for (i, row) in d.iter_mut().enumerate().take(cols) {
            row[i] = Complex::new(T::one(), T::zero());
        }
        return d;
    }
    let u = alpha / r;
    let x = r * r;
    for a in 0..rows {
        let f = displacement_column(x, a, cols);
        let up = u.powu(a as u32);
        for n in 0..cols {
            if n + a < rows {
                d[n + a][n] = up * f[n];
            }
        }
        if a > 0 && a < cols {
            let down = (-u.conj()).powu(a as u32);
            for m in 0..cols - a {
                d[m][m + a] = down * f[m];
            }
        }
    }
    d
}

fn displaced_rows<T: Real>(state: &PhotonicState<T>, alpha: Complex<T>) -> Result<(usize, Vec<Vec<Complex<T>>>)> {
    let n = state.cutoff();
    let mass = state.trace().f64();
    let mut rows = coherent_cutoff((alpha.norm().f64() + (n as f64).sqrt()).powi(2));
    for _ in 0..6 {
        let d = displacement_table(alpha, rows, n);
        // column norms of the table bound the probability kept
        let worst = (0..n).map(|c| 1.0 - d.iter().map(|row| row[c].norm_sqr().f64()).sum::<f64>()).fold(0.0, f64::max);
        if worst < 1e-12 || mass == 0.0 {
            return Ok((rows, d));
        }
        rows = rows * 3 / 2;
    }
    Err(Error::numerical("displacement table did not converge"))
}

/// Photon statistics of D(α)ρD†(α).
pub fn displaced_statistics<T: Real>(state: &PhotonicState<T>, alpha: Complex<T>) -> Result<PhotonStatistics<T>> {
    let (rows, d) = displaced_rows(state, alpha)?;
    let p = match state.density() {
        Density::Diagonal(p) => d.iter().map(|row| row.iter().zip(p).map(|(c, pn)| c.norm_sqr() * *pn).sum()).collect(),
        Density::Dense(rho) => d
            .iter()
            .map(|row| {
                let v: Vec<Complex<T>> = row.iter().map(|c| c.conj()).collect();
                sandwich(&v, rho).re.max(T::zero())
            })
            .collect(),
    };
    debug_assert_eq!(rows, d.len());
    Ok(PhotonStatistics::unchecked(p))
}

/// Full D(α)ρD†(α) as a dense state.
pub fn displaced_state<T: Real>(state: &PhotonicState<T>, alpha: Complex<T>) -> Result<PhotonicState<T>> {
    let (rows, d) = displaced_rows(state, alpha)?;
    let rho = state.to_dense();
    let n = state.cutoff();
    // tmp = D ρ, out = tmp D†
    let tmp: Vec<Vec<Complex<T>>> =
        d.iter().map(|row| (0..n).map(|j| (0..n).map(|i| row[i] * rho.get(i, j)).sum()).collect()).collect();
    let mut out = CMatrix::zeros(rows);
    for (m1, t) in tmp.iter().enumerate() {
        for (m2, drow) in d.iter().enumerate() {
            let v: Complex<T> = t.iter().zip(drow).map(|(a, b)| *a * b.conj()).sum();
            out.set(m1, m2, v);
        }
    }
    out.hermitize();
    Ok(PhotonicState::built(Density::Dense(out), state.label(), state.tail_mass()))
}

/// v† ρ v
fn sandwich<T: Real>(v: &[Complex<T>], rho: &CMatrix<T>) -> Complex<T> {
    let mut s = czero::<T>();
    for (i, vi) in v.iter().enumerate() {
        if *vi == czero() {
            continue;
        }
        let row = rho.row(i);
        let inner: Complex<T> = row.iter().zip(v).map(|(r, vj)| *r * *vj).sum();
        s += vi.conj() * inner;
    }
    s
}

/// Electron spectrum after the LO point (field α_LO = lo_amplitude·e^{iθ}) and
/// the quantum-light point, both with coupling g.
///
/// The exact engine sums ladder amplitudes over the intermediate index before
/// squaring. The approximate engine applies the Bessel kernel to the photon
/// statistics of the displaced state D(α_LO)ρD†(α_LO), which the exact
/// two-point spectrum equals identically.
pub fn two_point_spectrum<T: Real>(
    state: &PhotonicState<T>,
    lo_amplitude: Complex<T>,
    theta: T,
    g: &Coupling<T>,
    opts: &TwoPointOptions,
) -> Result<ElectronSpectrum<T>> {
    let alpha = lo_amplitude * Complex::from_polar(T::one(), theta);
    let spec = match opts.engine {
        Engine::Exact => two_point_exact(state, alpha, g, opts.k_range)?,
        Engine::Approx => {
            let stats = displaced_statistics(state, alpha)?;
            let mut s = spectrum_approx(&stats, g, opts.k_range)?;
            s = s.with_coupling(*g);
            s
        }
        other => {
            return Err(Error::invalid(format!(
                "two-point spectra use the exact or approx engine, not {}",
                other.name()
            )))
        }
    };
    Ok(spec.with_label(state.label()))
}

fn two_point_exact<T: Real>(
    state: &PhotonicState<T>,
    alpha: Complex<T>,
    g: &Coupling<T>,
    k_range: KRange,
) -> Result<ElectronSpectrum<T>> {
    let n_len = state.cutoff();
    let mass = state.trace();
    let x = g.magnitude() * g.magnitude();
    let u = g.unit();
    let beta_q = g.beta(state.mean_photon_number()).f64();
    let beta_lo = (g.magnitude() * alpha.norm()).f64();
    let (mut l_half, mut q_half) = (auto_k(beta_lo), auto_k(beta_q));
    if let KRange::Symmetric(k) = k_range {
        l_half = l_half.min(k);
        q_half = q_half.min(k);
    }
    loop {
        let k_half = match k_range {
            KRange::Symmetric(k) => k,
            KRange::Auto => l_half + q_half,
        };
        let probs = two_point_probs(state, alpha, g, x, u, n_len, l_half, q_half, k_half);
        if probs.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("two-point spectrum produced a non-finite value"));
        }
        let check = check_window(mass, &probs);
        if window_ok::<T>(&check, SPEC_TOL) {
            return Ok(ElectronSpectrum::raw(-(k_half as i64), probs, T::lit(check.leakage), Engine::Exact, *g));
        }
        let limit = k_limit(n_len, beta_lo + beta_q);
        if l_half + q_half >= limit {
            return Err(Error::Leakage { k_max: k_half, leakage: check.leakage.max(check.boundary), tol: SPEC_TOL });
        }
        l_half *= 2;
        q_half *= 2;
        if let KRange::Symmetric(k) = k_range {
            if l_half > 2 * k && q_half > 2 * k {
                return Err(Error::Leakage { k_max: k, leakage: check.leakage.max(check.boundary), tol: SPEC_TOL });
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn two_point_probs<T: Real>(
    state: &PhotonicState<T>,
    alpha: Complex<T>,
    g: &Coupling<T>,
    x: T,
    u: Complex<T>,
    n_len: usize,
    l_half: usize,
    q_half: usize,
    k_half: usize,
) -> Vec<T> {
    let comb = lo_comb(alpha, g, l_half);
    let cols = shift_columns(x, n_len, q_half);
    let c_at = |l: i64| -> Complex<T> {
        if l.unsigned_abs() as usize > l_half {
            czero()
        } else {
            comb[(l + l_half as i64) as usize]
        }
    };
    // amplitude of n_i → n_f = n_i − k'
    let amp = |n_i: usize, kq: i64| -> Complex<T> {
        let a = kq.unsigned_abs() as usize;
        let idx = (kq + q_half as i64) as usize;
        if kq >= 0 {
            (-u.conj()).powu(a as u32) * cols[idx][n_i - a]
        } else {
            u.powu(a as u32) * cols[idx][n_i]
        }
    };
    let n_out = n_len + q_half;
    let mut probs = vec![T::zero(); 2 * k_half + 1];
    let dense = match state.density() {
        Density::Dense(m) => Some(m),
        Density::Diagonal(_) => None,
    };
    let diag = state.diagonal();
    for n_f in 0..n_out {
        // (n_i, k', A) reachable into n_f
        let lo = n_f.saturating_sub(q_half);
        let hi = (n_f + q_half).min(n_len - 1);
        if lo > hi {
            continue;
        }
        let links: Vec<(usize, i64, Complex<T>)> =
            (lo..=hi).map(|n_i| (n_i, n_i as i64 - n_f as i64, amp(n_i, n_i as i64 - n_f as i64))).collect();
        for (ki, pk) in probs.iter_mut().enumerate() {
            let k = ki as i64 - k_half as i64;
            match dense {
                None => {
                    for &(n_i, kq, a) in &links {
                        let v = c_at(k - kq) * a;
                        *pk += v.norm_sqr() * diag[n_i];
                    }
                }
                Some(rho) => {
                    let v: Vec<Complex<T>> = links.iter().map(|&(_, kq, a)| c_at(k - kq) * a).collect();
                    let mut s = czero::<T>();
                    for (i1, &(n1, _, _)) in links.iter().enumerate() {
                        if v[i1] == czero() {
                            continue;
                        }
                        let row = rho.row(n1);
                        let inner: Complex<T> = links.iter().zip(&v).map(|(&(n2, _, _), v2)| row[n2] * v2.conj()).sum();
                        s += v[i1] * inner;
                    }
                    *pk += s.re;
                }
            }
        }
    }
    probs
}
