//! Brute-force reference: the generator g b a† − g* b† a assembled as a sparse
//! matrix on the truncated (photon, ladder) space and exponentiated numerically.
//! Double precision only.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::coupling::Coupling;
use super::spectrum::{ElectronSpectrum, Engine, InteractionOutcome, JointDistribution};
use crate::fockspace::{CMatrix, Density, PhotonicState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Ladder half-width K; indices beyond ±K are absent (open ladder, no wraparound).
    pub k_half: usize,
    /// Optional classical field at a preceding interaction point.
    pub lo: Option<Complex64>,
    /// Largest probability allowed on the outermost basis layers.
    pub leak_tol: f64,
    /// Enlargements tried before giving up.
    pub retries: usize,
}

impl OracleOptions {
    pub fn new(k_half: usize) -> Self {
        OracleOptions { k_half, lo: None, leak_tol: 1e-10, retries: 4 }
    }
}

/// Compressed sparse rows.
#[derive(Debug, Clone)]
pub struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Csr {
    /// From (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut t: Vec<(usize, usize, Complex64)>) -> Self {
        t.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(t.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[i] * x[self.cols[i]];
            }
            *yr = s;
        }
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|i| self.vals[i].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// exp(A) v by s scaled Taylor steps.
    pub fn expm_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let s = self.norm_inf().ceil().max(1.0) as usize;
        let mut y = v.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut next = vec![Complex64::new(0.0, 0.0); self.dim];
        for _ in 0..s {
            term.copy_from_slice(&y);
            let base: f64 = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for j in 1..200 {
                self.matvec(&term, &mut next);
                let scale = 1.0 / (s as f64 * j as f64);
                let mut tn = 0.0;
                for (t, nx) in term.iter_mut().zip(&next) {
                    *t = *nx * scale;
                    tn += t.norm_sqr();
                }
                for (yi, t) in y.iter_mut().zip(&term) {
                    *yi += *t;
                }
                if tn.sqrt() <= 1e-18 * base {
                    break;
                }
            }
        }
        y
    }
}

/// g b a† − g* b† a on photons 0..n_ph and ladder −K..=K, index n(2K+1) + k + K.
pub fn generator(n_ph: usize, k_half: usize, g: Complex64) -> Csr {
    let w = 2 * k_half + 1;
    let kk = k_half as i64;
    let idx = |n: usize, k: i64| n * w + (k + kk) as usize;
    let mut t = Vec::new();
    for n in 0..n_ph {
        for k in -kk..=kk {
            let row = idx(n, k);
            // g b a†: |n−1, k+1⟩ → √n |n, k⟩
            if n >= 1 && k < kk {
                t.push((row, idx(n - 1, k + 1), g * (n as f64).sqrt()));
            }
            // −g* b† a: |n+1, k−1⟩ → √(n+1) |n, k⟩
            if n + 1 < n_ph && k > -kk {
                t.push((row, idx(n + 1, k - 1), -g.conj() * ((n + 1) as f64).sqrt()));
            }
        }
    }
    Csr::from_triplets(n_ph * w, t)
}

/// Electron ladder state after a classical field α: exp(g α* b − g* α b†)|0⟩.
fn lo_ladder(k_half: usize, g: Complex64, alpha: Complex64) -> Vec<Complex64> {
    let w = 2 * k_half + 1;
    let mut t = Vec::new();
    for i in 0..w {
        if i + 1 < w {
            t.push((i, i + 1, g * alpha.conj()));
        }
        if i >= 1 {
            t.push((i, i - 1, -g.conj() * alpha));
        }
    }
    let gen = Csr::from_triplets(w, t);
    let mut e0 = vec![Complex64::new(0.0, 0.0); w];
    e0[k_half] = Complex64::new(1.0, 0.0);
    gen.expm_apply(&e0)
}

/// Weighted pure components of ρ.
fn components(state: &PhotonicState<f64>) -> Vec<(f64, Vec<Complex64>)> {
    let n = state.cutoff();
    match state.density() {
        Density::Diagonal(p) => p
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[i] = Complex64::new(1.0, 0.0);
                (*w, v)
            })
            .collect(),
        Density::Dense(rho) => {
            let m = DMatrix::from_fn(n, n, |i, j| rho.get(i, j));
            let eig = m.symmetric_eigen();
            (0..n)
                .filter(|&i| eig.eigenvalues[i] > 1e-15)
                .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().cloned().collect()))
                .collect()
        }
    }
}

/// Spectrum, joint table and traced-out state from explicit propagation.
pub fn oracle_spectrum(
    state: &PhotonicState<f64>,
    g: &Coupling<f64>,
    opts: &OracleOptions,
) -> Result<InteractionOutcome<f64>> {
    let comps = components(state);
    let n_in = state.cutoff();
    let mut k_half = opts.k_half;
    let mut pad = opts.k_half + 2;
    let mut worst = 0.0;
    for _ in 0..=opts.retries {
        let n_ph = n_in + pad;
        let w = 2 * k_half + 1;
        if n_ph * w > 2_000_000 {
            break;
        }
        let gen = generator(n_ph, k_half, g.value());
        let ladder = match opts.lo {
            Some(a) => lo_ladder(k_half, g.value(), a),
            None => {
                let mut e = vec![Complex64::new(0.0, 0.0); w];
                e[k_half] = Complex64::new(1.0, 0.0);
                e
            }
        };
        let mut joint = JointDistribution::zeros(n_ph, -(k_half as i64), w);
        let mut post = CMatrix::<f64>::zeros(n_ph);
        let mut edge = 0.0;
        let dense = !state.is_diagonal();
        for (weight, psi) in &comps {
            let mut v = vec![Complex64::new(0.0, 0.0); n_ph * w];
            for (n, a) in psi.iter().enumerate() {
                for (i, e) in ladder.iter().enumerate() {
                    v[n * w + i] = *a * *e;
                }
            }
            let out = gen.expm_apply(&v);
            for n in 0..n_ph {
                for i in 0..w {
                    let p = weight * out[n * w + i].norm_sqr();
                    joint.add(n, i as i64 - k_half as i64, p);
                    if n + 1 == n_ph || i == 0 || i + 1 == w {
                        edge += p;
                    }
                }
            }
            if dense {
                for n1 in 0..n_ph {
                    for n2 in 0..n_ph {
                        let s: Complex64 = (0..w).map(|i| out[n1 * w + i] * out[n2 * w + i].conj()).sum();
                        post.add_at(n1, n2, s * *weight);
                    }
                }
            }
        }
        if edge <= opts.leak_tol {
            let probs = joint.ladder_marginal();
            let leak = (state.trace() - probs.iter().sum::<f64>()).abs() + edge;
            let diag = joint.photon_marginal();
            let density = if dense { Density::Dense(post) } else { Density::Diagonal(diag) };
            let post_state = PhotonicState::built(density, state.label(), state.tail_mass());
            let spectrum =
                ElectronSpectrum::raw(-(k_half as i64), probs, leak, Engine::Oracle, *g).with_label(state.label());
            return Ok(InteractionOutcome { spectrum, post_state_traced: post_state, joint: Some(joint) });
        }
        worst = edge;
        k_half = k_half * 3 / 2 + 1;
        pad *= 2;
    }
    Err(Error::Leakage { k_max: k_half, leakage: worst, tol: opts.leak_tol })
}

/// Two independent pure modes meeting one electron at two points with the same g:
/// generator g b (a₁† + a₂†) − g* b† (a₁ + a₂).
pub fn oracle_two_mode_spectrum(
    psi1: &[Complex64],
    psi2: &[Complex64],
    g: &Coupling<f64>,
    k_half: usize,
) -> Result<ElectronSpectrum<f64>> {
    let n1 = psi1.len() + k_half + 2;
    let n2 = psi2.len() + k_half + 2;
    let w = 2 * k_half + 1;
    let kk = k_half as i64;
    let idx = |a: usize, b: usize, k: i64| (a * n2 + b) * w + (k + kk) as usize;
    let gv = g.value();
    let mut t = Vec::new();
    for a in 0..n1 {
        for b in 0..n2 {
            for k in -kk..=kk {
                let row = idx(a, b, k);
                if k < kk {
                    if a >= 1 {
                        t.push((row, idx(a - 1, b, k + 1), gv * (a as f64).sqrt()));
                    }
                    if b >= 1 {
                        t.push((row, idx(a, b - 1, k + 1), gv * (b as f64).sqrt()));
                    }
                }
                if k > -kk {
                    if a + 1 < n1 {
                        t.push((row, idx(a + 1, b, k - 1), -gv.conj() * ((a + 1) as f64).sqrt()));
                    }
                    if b + 1 < n2 {
                        t.push((row, idx(a, b + 1, k - 1), -gv.conj() * ((b + 1) as f64).sqrt()));
                    }
                }
            }
        }
    }
    let gen = Csr::from_triplets(n1 * n2 * w, t);
    let mut v = vec![Complex64::new(0.0, 0.0); n1 * n2 * w];
    let norm1: f64 = psi1.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let norm2: f64 = psi2.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for (a, ca) in psi1.iter().enumerate() {
        for (b, cb) in psi2.iter().enumerate() {
            v[idx(a, b, 0)] = *ca * *cb / (norm1 * norm2);
        }
    }
    let out = gen.expm_apply(&v);
    let mut probs = vec![0.0; w];
    let mut edge = 0.0;
    for a in 0..n1 {
        for b in 0..n2 {
            for i in 0..w {
                let p = out[(a * n2 + b) * w + i].norm_sqr();
                probs[i] += p;
                if a + 1 == n1 || b + 1 == n2 || i == 0 || i + 1 == w {
                    edge += p;
                }
            }
        }
    }
    if edge > 1e-10 {
        return Err(Error::Leakage { k_max: k_half, leakage: edge, tol: 1e-10 });
    }
    Ok(ElectronSpectrum::raw(-kk, probs, edge, Engine::Oracle, *g))
}
