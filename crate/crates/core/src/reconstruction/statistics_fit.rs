use nalgebra::{DMatrix, DVector};

use crate::fockspace::PhotonStatistics;
use crate::interaction::{Coupling, ElectronSpectrum};
use crate::special::bessel_j_seq;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Smoothness penalty weight relative to the largest squared singular value;
    /// `None` engages it only when the problem is ill-posed.
    pub lambda: Option<f64>,
    /// Ill-posed when σ_min/σ_max of the kernel submatrix is below this.
    pub rank_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { lambda: None, rank_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct StatisticsFit {
    pub support: Vec<usize>,
    /// p at each support point.
    pub weights: Vec<f64>,
    /// Same weights on the dense grid 0..=max(support).
    pub statistics: PhotonStatistics<f64>,
    /// ‖A p − P‖₂
    pub residual: f64,
    pub regularized: bool,
    /// Absolute penalty weight used.
    pub lambda: f64,
    /// σ_max/σ_min of the kernel submatrix.
    pub condition: f64,
}

impl StatisticsFit {
    /// CSV with header `n,p` on the dense grid.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "p"])?;
        for (n, p) in self.statistics.probs().iter().enumerate() {
            w.write_record([n.to_string(), crate::io::fmt_f64(*p)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

/// A[k][j] = J_k(2|g|√n_j)², rows in the order of `ks`.
pub fn kernel_matrix(ks: &[i64], support: &[usize], g_abs: f64) -> DMatrix<f64> {
    let k_top = ks.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    let mut a = DMatrix::zeros(ks.len(), support.len());
    for (j, &n) in support.iter().enumerate() {
        let jv = bessel_j_seq(2.0 * g_abs * (n as f64).sqrt(), k_top);
        for (i, k) in ks.iter().enumerate() {
            let v = jv[k.unsigned_abs() as usize];
            a[(i, j)] = v * v;
        }
    }
    a
}

/// Bessel-kernel least squares for p_n on `support`, with p ≥ 0 and Σp = 1.
pub fn statistics_from_spectrum(
    spectrum: &ElectronSpectrum<f64>,
    g: &Coupling<f64>,
    support: &[usize],
    opts: &FitOptions,
) -> Result<StatisticsFit> {
    if support.is_empty() {
        return Err(Error::invalid("empty support"));
    }
    if support.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("support must be strictly increasing"));
    }
    if !(g.magnitude() > 0.0) {
        return Err(Error::invalid("statistics fit needs |g| > 0"));
    }
    let ks: Vec<i64> = spectrum.ks().collect();
    let y = DVector::from_iterator(ks.len(), ks.iter().map(|k| spectrum.get(*k)));
    let a = kernel_matrix(&ks, support, g.magnitude());
    let sv = a.clone().singular_values();
    let smax = sv.max();
    let smin = if support.len() > ks.len() { 0.0 } else { sv.min() };
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let ill_posed = smin <= opts.rank_tol * smax;
    let (regularized, lambda) = match opts.lambda {
        Some(l) => (l > 0.0, l * smax * smax),
        None if ill_posed => (true, 1e-6 * smax * smax),
        None => (false, 0.0),
    };
    let mut q = a.transpose() * &a;
    if regularized {
        let l = smoothness(support.len());
        q += (l.transpose() * l) * lambda;
    }
    let b = a.transpose() * &y;
    let p = simplex_qp(&q, &b)?;
    let residual = (&a * &p - &y).norm();
    let top = *support.last().unwrap();
    let mut dense = vec![0.0; top + 1];
    for (j, &n) in support.iter().enumerate() {
        dense[n] = p[j];
    }
    Ok(StatisticsFit {
        support: support.to_vec(),
        weights: p.iter().cloned().collect(),
        statistics: PhotonStatistics::from_weights(dense)?,
        residual,
        regularized,
        lambda,
        condition,
    })
}

/// Second differences along the support (identity for fewer than 3 points).
fn smoothness(n: usize) -> DMatrix<f64> {
    if n < 3 {
        return DMatrix::identity(n, n);
    }
    let mut l = DMatrix::zeros(n - 2, n);
    for i in 0..n - 2 {
        l[(i, i)] = 1.0;
        l[(i, i + 1)] = -2.0;
        l[(i, i + 2)] = 1.0;
    }
    l
}

/// min ½pᵀQp − bᵀp subject to p ≥ 0, Σp = 1, by a primal active-set method.
fn simplex_qp(q: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = b.len();
    let scale = q.amax().max(b.amax()).max(f64::MIN_POSITIVE);
    let tol = 1e-13 * scale;
    let j0 = (0..n).min_by(|&i, &j| (0.5 * q[(i, i)] - b[i]).partial_cmp(&(0.5 * q[(j, j)] - b[j])).unwrap()).unwrap();
    let mut free = vec![false; n];
    free[j0] = true;
    let mut p = DVector::zeros(n);
    p[j0] = 1.0;
    for _ in 0..(20 * n + 100) {
        let f: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        let (z, nu) = solve_kkt(q, b, &f)?;
        if z.iter().all(|v| *v >= 0.0) {
            for (i, &fi) in f.iter().enumerate() {
                p[fi] = z[i];
            }
            let grad = q * &p - b;
            let worst =
                (0..n).filter(|&i| !free[i]).map(|i| (i, grad[i] + nu)).min_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
            match worst {
                Some((i, mu)) if mu < -tol => free[i] = true,
                _ => return Ok(p),
            }
        } else {
            let mut alpha = 1.0f64;
            let mut block = Vec::new();
            for (i, &fi) in f.iter().enumerate() {
                if z[i] < 0.0 {
                    let t = p[fi] / (p[fi] - z[i]);
                    if t < alpha - 1e-15 {
                        alpha = t;
                        block.clear();
                        block.push(fi);
                    } else if (t - alpha).abs() <= 1e-15 {
                        block.push(fi);
                    }
                }
            }
            for (i, &fi) in f.iter().enumerate() {
                p[fi] += alpha * (z[i] - p[fi]);
            }
            for fi in block {
                p[fi] = 0.0;
                free[fi] = false;
            }
            if !free.iter().any(|v| *v) {
                return Err(Error::numerical("active-set solver emptied the free set"));
            }
        }
    }
    Err(Error::numerical("active-set solver did not converge"))
}

/// [Q_FF 1; 1ᵀ 0][z; ν] = [b_F; 1]
fn solve_kkt(q: &DMatrix<f64>, b: &DVector<f64>, f: &[usize]) -> Result<(Vec<f64>, f64)> {
    let m = f.len();
    let mut k = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (i, &fi) in f.iter().enumerate() {
        for (j, &fj) in f.iter().enumerate() {
            k[(i, j)] = q[(fi, fj)];
        }
        k[(i, m)] = 1.0;
        k[(m, i)] = 1.0;
        rhs[i] = b[fi];
    }
    rhs[m] = 1.0;
    let sol = match k.clone().lu().solve(&rhs) {
        Some(s) if s.iter().all(|v| v.is_finite()) => s,
        _ => k.svd(true, true).solve(&rhs, 1e-14).map_err(|e| Error::numerical(e.to_string()))?,
    };
    Ok((sol.iter().take(m).cloned().collect(), sol[m]))
}
