use serde::Serialize;

use crate::interaction::Coupling;
use crate::special::{ln_factorial, ln_odd_double_factorial};
use crate::{Error, Real, Result};

/// Forward coefficients c_km (P_k = Σ_m c_km ⟨n^m⟩) and their analytic inverse
/// d_mk (⟨n^m⟩ = Σ_k d_mk P_k), for k = 1..K and m = 1..M.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentKernel<T> {
    g_magnitude: T,
    order: usize,
    peaks: usize,
    /// row k−1, column m−1
    c: Vec<T>,
    /// row m−1, column k−1
    d: Vec<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelInfo {
    pub g: f64,
    #[serde(rename = "M")]
    pub order: usize,
    #[serde(rename = "K")]
    pub peaks: usize,
}

fn ln_c<T: Real>(k: usize, m: usize, ln_g: T) -> T {
    T::lit(2.0) * T::of(m) * ln_g + ln_factorial::<T>(2 * m)
        - ln_factorial::<T>(m - k)
        - ln_factorial::<T>(m + k)
        - T::lit(2.0) * ln_factorial::<T>(m)
}

fn ln_d<T: Real>(m: usize, k: usize, ln_g: T) -> T {
    let h = (k - m).div_ceil(2);
    let q = (k - m) / 2;
    T::of(h) * T::LN_2() + T::of(k).ln() + ln_factorial::<T>(m) - T::lit(2.0) * T::of(m) * ln_g
        + ln_factorial::<T>(m - 1 + h)
        + ln_odd_double_factorial::<T>((2 * m + 2 * q) as i64 - 1)
        - ln_factorial::<T>(k - m)
        - ln_odd_double_factorial::<T>(2 * m as i64 - 1)
}

pub fn build_kernel<T: Real>(g: &Coupling<T>, order: usize, peaks: usize) -> Result<MomentKernel<T>> {
    if order == 0 || peaks < order {
        return Err(Error::invalid(format!("kernel needs K >= M >= 1 (got M = {order}, K = {peaks})")));
    }
    let gm = g.magnitude();
    if !(gm > T::zero()) {
        return Err(Error::invalid("kernel needs |g| > 0"));
    }
    let ln_g = gm.ln();
    let limit = T::max_value().ln() - T::lit(2.0);
    let fits = |m: usize| -> bool {
        (m..=peaks).all(|k| ln_d::<T>(m, k, ln_g) < limit) && (1..=m).all(|k| ln_c::<T>(k, m, ln_g) < limit)
    };
    if !fits(order) {
        let max_ok = (1..order).take_while(|m| fits(*m)).last().unwrap_or(0);
        return Err(Error::invalid(format!(
            "kernel coefficients overflow at M = {order}, K = {peaks}, |g| = {gm}; max feasible order is {max_ok}"
        )));
    }
    let mut c = vec![T::zero(); peaks * order];
    for k in 1..=peaks {
        for m in k..=order {
            let v = ln_c::<T>(k, m, ln_g).exp();
            c[(k - 1) * order + m - 1] = if (m - k) % 2 == 0 { v } else { -v };
        }
    }
    let mut d = vec![T::zero(); order * peaks];
    for m in 1..=order {
        for k in m..=peaks {
            d[(m - 1) * peaks + k - 1] = ln_d::<T>(m, k, ln_g).exp();
        }
    }
    Ok(MomentKernel { g_magnitude: gm, order, peaks, c, d })
}

impl<T: Real> MomentKernel<T> {
    pub fn g_magnitude(&self) -> T {
        self.g_magnitude
    }

    /// M
    pub fn order(&self) -> usize {
        self.order
    }

    /// K
    pub fn peaks(&self) -> usize {
        self.peaks
    }

    /// c_km, 1-based; zero outside m ∈ k..=M.
    pub fn c(&self, k: usize, m: usize) -> T {
        if k == 0 || m == 0 || k > self.peaks || m > self.order {
            return T::zero();
        }
        self.c[(k - 1) * self.order + m - 1]
    }

    /// d_mk, 1-based; zero outside k ∈ m..=K.
    pub fn d(&self, m: usize, k: usize) -> T {
        if k == 0 || m == 0 || k > self.peaks || m > self.order {
            return T::zero();
        }
        self.d[(m - 1) * self.peaks + k - 1]
    }

    /// max_{m,l} |Σ_k d_mk c_kl − δ_ml|
    pub fn identity_error(&self) -> T {
        let mut worst = T::zero();
        for m in 1..=self.order {
            for l in 1..=self.order {
                let s: T = (1..=self.peaks).map(|k| self.d(m, k) * self.c(k, l)).sum();
                let want = if m == l { T::one() } else { T::zero() };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }

    pub fn info(&self) -> KernelInfo {
        KernelInfo { g: self.g_magnitude.f64(), order: self.order, peaks: self.peaks }
    }
}
