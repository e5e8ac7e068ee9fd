use crate::fockspace::MomentVector;
use crate::interaction::{Coupling, ElectronSpectrum};
use crate::{Error, Real, Result};

/// f_m(n) = Σ_{n'} (n − n')^m |⟨n'|S|n⟩|² = ⟨n|(n − n̂ − |g|(a + a†) − |g|²)^m|n⟩.
fn ladder_power_sum<T: Real>(g_abs: T, m: usize, n: usize) -> T {
    let len = n + m + 2;
    let mut v = vec![T::zero(); len];
    v[n] = T::one();
    let g2 = g_abs * g_abs;
    for _ in 0..m {
        let mut w = vec![T::zero(); len];
        for j in 0..len {
            if v[j] == T::zero() {
                continue;
            }
            w[j] += (T::of(n) - T::of(j) - g2) * v[j];
            // a|j⟩ = √j |j−1⟩, a†|j⟩ = √(j+1) |j+1⟩
            if j > 0 {
                w[j - 1] -= g_abs * T::of(j).sqrt() * v[j];
            }
            if j + 1 < len {
                w[j + 1] -= g_abs * T::of(j + 1).sqrt() * v[j];
            }
        }
        v = w;
    }
    v[n]
}

/// Monomial coefficients of f_m(n) (degree ⌊m/2⌋) for m = 0..=m_max.
pub fn ladder_polynomials<T: Real>(g: &Coupling<T>, m_max: usize) -> Vec<Vec<T>> {
    (0..=m_max)
        .map(|m| {
            let deg = m / 2;
            let pts = deg + 1;
            // Vandermonde system on n = 0..=deg, solved by Gaussian elimination
            let mut a: Vec<Vec<T>> = (0..pts)
                .map(|n| {
                    let mut row: Vec<T> = (0..pts).map(|j| T::of(n).powi(j as i32)).collect();
                    row.push(ladder_power_sum(g.magnitude(), m, n));
                    row
                })
                .collect();
            for col in 0..pts {
                let piv = (col..pts).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
                a.swap(col, piv);
                for r in 0..pts {
                    if r != col {
                        let f = a[r][col] / a[col][col];
                        for c in col..=pts {
                            let v = a[col][c];
                            a[r][c] -= f * v;
                        }
                    }
                }
            }
            (0..pts).map(|j| a[j][pts] / a[j][j]).collect()
        })
        .collect()
}

/// ⟨n^i⟩, i = 1..=order, from the even power sums Σ k^{2i} P_k of an
/// exact-engine spectrum (no Bessel-kernel approximation).
pub fn ladder_moments<T: Real>(
    spectrum: &ElectronSpectrum<T>,
    g: &Coupling<T>,
    order: usize,
) -> Result<MomentVector<T>> {
    if order == 0 {
        return Err(Error::invalid("order must be at least 1"));
    }
    if !(g.magnitude() > T::zero()) {
        return Err(Error::invalid("ladder inversion needs |g| > 0"));
    }
    let poly = ladder_polynomials(g, 2 * order);
    let mut nm = vec![spectrum.total()];
    for i in 1..=order {
        let mu = spectrum.moment(2 * i as u32);
        let a = &poly[2 * i];
        let lower: T = (0..i).map(|j| a[j] * nm[j]).sum();
        nm.push((mu - lower) / a[i]);
    }
    Ok(MomentVector::new(nm[1..].to_vec()))
}
