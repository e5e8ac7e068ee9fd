use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::scan::HomodyneScan;
use crate::interaction::compose_interactions;
use crate::io::fmt_f64;
use crate::reconstruction::{build_kernel, moments_from_spectrum, MomentKernel, PeakPolicy};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    Gaussian,
    GramCharlier,
    MaxEntropy,
}

/// pr(x|θ) on a grid together with the quadrature moments it was built from.
#[derive(Debug, Clone)]
pub struct QuadratureDistribution {
    pub theta: f64,
    pub x_grid: Vec<f64>,
    pub density: Vec<f64>,
    /// ⟨X^m(θ)⟩, m = 1..M.
    pub moments: Vec<f64>,
    pub method: DensityMethod,
}

impl QuadratureDistribution {
    pub fn mean(&self) -> f64 {
        self.moments[0]
    }

    pub fn variance(&self) -> f64 {
        self.moments[1] - self.moments[0] * self.moments[0]
    }

    /// Trapezoid ∫ density dx.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.x_grid, &self.density)
    }

    /// CSV `x,density`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "density"])?;
        for (x, p) in self.x_grid.iter().zip(&self.density) {
            w.write_record([fmt_f64(*x), fmt_f64(*p)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureOptions {
    /// Noiseless spectra tolerate a tight remainder bound.
    pub policy: PeakPolicy,
    /// Common x grid; default 201 points spanning every distribution by 8σ.
    pub x_grid: Option<Vec<f64>>,
    pub grid_points: usize,
    /// Gram-Charlier densities more negative than this fraction of the peak
    /// switch to the maximum-entropy fit.
    pub negativity: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            policy: PeakPolicy { rtol: 1e-10, noise_floor: 0.0 },
            x_grid: None,
            grid_points: 201,
            negativity: 1e-3,
        }
    }
}

/// Kernel for the composed two-point mode (coupling √2 g), covering every
/// peak present in the scan.
pub fn scan_kernel(scan: &HomodyneScan, order: usize) -> Result<MomentKernel<f64>> {
    let composed = compose_interactions(scan.g, 2)?;
    let top = scan
        .spectra
        .iter()
        .chain(&scan.opposite)
        .chain([&scan.lo_only, &scan.quantum_only])
        .map(|s| s.k_max())
        .max()
        .unwrap_or(0)
        .max(order as i64) as usize;
    build_kernel(&composed.coupling, order, top)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// ⟨ñ^m⟩, m = 1..M, where ñ is half the displaced photon number.
fn n_tilde_moments(
    spectrum: &crate::interaction::ElectronSpectrum<f64>,
    kernel: &MomentKernel<f64>,
    policy: &PeakPolicy,
) -> Result<Vec<f64>> {
    Ok(moments_from_spectrum(spectrum, kernel, policy)?.moments.values().to_vec())
}

/// Quadrature moments ⟨X^m(θ)⟩ and densities per scanned θ.
///
/// `kernel` must be built at the composed coupling √2|g| (see [`scan_kernel`]).
/// ñ = ½(|α|² + a†a + 2|α|X) is inverted with Y = (2ñ − |α|²)/(2|α|); the
/// a†a contribution is removed by combining θ with θ + π and subtracting
/// ⟨n^m⟩/(2|α|)^m measured on the quantum-only spectrum.
pub fn quadrature_from_scan(
    scan: &HomodyneScan,
    kernel: &MomentKernel<f64>,
    order: usize,
    opts: &QuadratureOptions,
) -> Result<Vec<QuadratureDistribution>> {
    if order < 2 {
        return Err(Error::invalid("quadrature extraction needs order M >= 2"));
    }
    if kernel.order() < order {
        return Err(Error::invalid(format!("kernel order {} is below the requested M = {order}", kernel.order())));
    }
    let g2 = std::f64::consts::SQRT_2 * scan.g.magnitude();
    if (kernel.g_magnitude() - g2).abs() > 1e-12 * g2 {
        return Err(Error::invalid(format!(
            "kernel coupling {} does not match the composed coupling √2|g| = {g2}",
            kernel.g_magnitude()
        )));
    }
    let policy = &opts.policy;
    let pow2 = |v: Vec<f64>| -> Vec<f64> { v.iter().enumerate().map(|(i, x)| x * 2f64.powi(i as i32 + 1)).collect() };
    let lo_int = pow2(n_tilde_moments(&scan.lo_only, kernel, policy)?)[0];
    if !(lo_int > 0.0) {
        return Err(Error::IllPosed(format!("LO-only spectrum gives intensity {lo_int}")));
    }
    let amp = lo_int.sqrt();
    let quantum = pow2(n_tilde_moments(&scan.quantum_only, kernel, policy)?);

    let y_moments = |nt: &[f64]| -> Vec<f64> {
        // ⟨Y^m⟩ with Y = (2ñ − L)/(2A)
        (1..=order)
            .map(|m| {
                let s: f64 = (0..=m)
                    .map(|j| {
                        let e = if j == 0 { 1.0 } else { (2.0f64).powi(j as i32) * nt[j - 1] };
                        binomial(m, j) * e * (-lo_int).powi((m - j) as i32)
                    })
                    .sum();
                s / (2.0 * amp).powi(m as i32)
            })
            .collect()
    };

    let moments: Vec<Vec<f64>> = (0..scan.thetas.len())
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let y = y_moments(&n_tilde_moments(&scan.spectra[i], kernel, policy)?);
            let y_opp = y_moments(&n_tilde_moments(&scan.opposite[i], kernel, policy)?);
            Ok((1..=order)
                .map(|m| {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let mut mu = 0.5 * (y[m - 1] + sign * y_opp[m - 1]);
                    if m % 2 == 0 {
                        mu -= quantum[m - 1] / (2.0 * amp).powi(m as i32);
                    }
                    mu
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let grid = match &opts.x_grid {
        Some(g) => {
            if g.len() < 3 {
                return Err(Error::invalid("x grid needs at least 3 points"));
            }
            g.clone()
        }
        None => {
            let half = moments
                .iter()
                .map(|mu| mu[0].abs() + 8.0 * (mu[1] - mu[0] * mu[0]).max(0.0).sqrt())
                .fold(0.0f64, f64::max)
                .max(1.0);
            let n = opts.grid_points.max(3);
            (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
        }
    };

    scan.thetas
        .par_iter()
        .zip(moments.par_iter())
        .map(|(&theta, mu)| {
            let (density, method) = density_from_moments(mu, &grid, opts.negativity)
                .map_err(|e| Error::IllPosed(format!("θ = {theta:.6}: {e}")))?;
            Ok(QuadratureDistribution { theta, x_grid: grid.clone(), density, moments: mu.clone(), method })
        })
        .collect()
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// Positive definiteness of the Hankel matrix [μ_{i+j}] (μ_0 = 1).
fn hankel_check(mu: &[f64]) -> std::result::Result<(), String> {
    let h = mu.len() / 2;
    let get = |i: usize| if i == 0 { 1.0 } else { mu[i - 1] };
    let mat = DMatrix::from_fn(h + 1, h + 1, |i, j| get(i + j));
    if mat.clone().cholesky().is_none() {
        let ev = mat.symmetric_eigen().eigenvalues.min();
        return Err(format!("moments {mu:?} violate the Hankel condition (smallest eigenvalue {ev:.3e})"));
    }
    Ok(())
}

/// Coefficients of the probabilists' Hermite polynomials He_0..He_M.
fn hermite_coeffs(m: usize) -> Vec<Vec<f64>> {
    let mut he = vec![vec![1.0], vec![0.0, 1.0]];
    for j in 1..m {
        let mut next = vec![0.0; j + 2];
        for (i, c) in he[j].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in he[j - 1].iter().enumerate() {
            next[i] -= j as f64 * c;
        }
        he.push(next);
    }
    he.truncate(m + 1);
    he
}

/// Raw moments → moments of z = (X − μ)/σ, index 0..=M.
fn standardized(mu: &[f64], mean: f64, sd: f64) -> Vec<f64> {
    let raw = |i: usize| if i == 0 { 1.0 } else { mu[i - 1] };
    (0..=mu.len())
        .map(|j| {
            let c: f64 = (0..=j).map(|i| binomial(j, i) * raw(i) * (-mean).powi((j - i) as i32)).sum();
            c / sd.powi(j as i32)
        })
        .collect()
}

fn density_from_moments(
    mu: &[f64],
    grid: &[f64],
    negativity: f64,
) -> std::result::Result<(Vec<f64>, DensityMethod), String> {
    hankel_check(mu)?;
    let mean = mu[0];
    let var = mu[1] - mean * mean;
    if !(var > 0.0) {
        return Err(format!("non-positive variance {var:.3e}"));
    }
    let sd = var.sqrt();
    let s = standardized(mu, mean, sd);
    let he = hermite_coeffs(mu.len());
    let mut coeffs = Vec::new();
    let mut fact = 2.0;
    for (j, h) in he.iter().enumerate().skip(3) {
        fact *= j as f64;
        coeffs.push(h.iter().enumerate().map(|(i, c)| c * s[i]).sum::<f64>() / fact);
    }
    let significant = coeffs.iter().any(|c| c.abs() > 1e-12);
    let gauss = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt() / sd;
    let mut density: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let z = (x - mean) / sd;
            let mut corr = 1.0;
            for (c, h) in coeffs.iter().zip(he.iter().skip(3)) {
                corr += c * h.iter().rev().fold(0.0, |acc, a| acc * z + a);
            }
            gauss(z) * corr
        })
        .collect();
    let peak = density.iter().cloned().fold(0.0f64, f64::max);
    let lowest = density.iter().cloned().fold(0.0f64, f64::min);
    let method = if !significant {
        DensityMethod::Gaussian
    } else if lowest >= -negativity * peak {
        DensityMethod::GramCharlier
    } else {
        density = max_entropy(&s, grid, mean, sd)?;
        DensityMethod::MaxEntropy
    };
    for v in density.iter_mut() {
        *v = v.max(0.0);
    }
    let norm = trapezoid(grid, &density);
    if !(norm > 0.0) {
        return Err("density vanishes on the grid; widen x_grid".into());
    }
    density.iter_mut().for_each(|v| *v /= norm);
    Ok((density, method))
}

/// p(z) ∝ exp(Σ_j λ_j z^j), matching standardized moments up to the largest
/// even order; Newton iteration on the convex dual.
fn max_entropy(s: &[f64], grid: &[f64], mean: f64, sd: f64) -> std::result::Result<Vec<f64>, String> {
    let order = if (s.len() - 1).is_multiple_of(2) { s.len() - 1 } else { s.len() - 2 };
    let z: Vec<f64> = grid.iter().map(|x| (x - mean) / sd).collect();
    let w: Vec<f64> = (0..z.len())
        .map(|i| {
            let lo = if i > 0 { z[i] - z[i - 1] } else { 0.0 };
            let hi = if i + 1 < z.len() { z[i + 1] - z[i] } else { 0.0 };
            0.5 * (lo + hi)
        })
        .collect();
    let powers: Vec<Vec<f64>> = z.iter().map(|&zi| (1..=order).map(|j| zi.powi(j as i32)).collect()).collect();
    let dual = |lam: &[f64]| -> (f64, Vec<f64>) {
        let e: Vec<f64> = powers.iter().map(|p| p.iter().zip(lam).map(|(a, b)| a * b).sum::<f64>()).collect();
        let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let q: Vec<f64> = e.iter().zip(&w).map(|(v, wi)| wi * (v - top).exp()).collect();
        let zsum: f64 = q.iter().sum();
        let val = zsum.ln() + top - lam.iter().zip(&s[1..=order]).map(|(a, b)| a * b).sum::<f64>();
        (val, q.iter().map(|v| v / zsum).collect())
    };
    let mut lam = vec![0.0; order];
    lam[1] = -0.5;
    for _ in 0..200 {
        let (val, q) = dual(&lam);
        let ez: Vec<f64> = (0..order).map(|j| q.iter().zip(&powers).map(|(qi, p)| qi * p[j]).sum()).collect();
        let grad = DVector::from_fn(order, |j, _| ez[j] - s[j + 1]);
        if grad.norm() < 1e-10 {
            let (_, q) = dual(&lam);
            return Ok(q.iter().zip(&w).map(|(qi, wi)| if *wi > 0.0 { qi / wi / sd } else { 0.0 }).collect());
        }
        let hess = DMatrix::from_fn(order, order, |a, b| {
            q.iter().zip(&powers).map(|(qi, p)| qi * p[a] * p[b]).sum::<f64>() - ez[a] * ez[b]
        });
        let step = match hess.cholesky() {
            Some(ch) => ch.solve(&grad),
            None => return Err("maximum-entropy Hessian is singular".into()),
        };
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = lam.iter().zip(step.iter()).map(|(l, d)| l - t * d).collect();
            if dual(&trial).0 <= val - 1e-4 * t * grad.dot(&step) || t < 1e-10 {
                lam = trial;
                break;
            }
            t *= 0.5;
        }
    }
    Err("maximum-entropy fit did not converge".into())
}
