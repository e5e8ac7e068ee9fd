use super::approx::auto_k;
use super::coupling::Coupling;
use super::exact::{check_window, window_ok};
use super::spectrum::{ElectronSpectrum, Engine, KRange};
use super::SPEC_TOL;
use crate::special::{bessel_i_scaled_seq, bessel_j_seq, hyp2f2_series, ln_factorial, ln_gamma};
use crate::{Error, Real, Result};

/// State families with closed-form spectra in the Bessel-kernel regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm<T> {
    Fock {
        n: usize,
    },
    /// J_k²(2β) plus the F(β)/⟨n⟩ correction.
    Coherent {
        mean_n: T,
    },
    Thermal {
        mean_n: T,
    },
    SqueezedVacuum {
        mean_n: T,
    },
}

impl<T: Real> ClosedForm<T> {
    fn mean_n(&self) -> T {
        match *self {
            ClosedForm::Fock { n } => T::of(n),
            ClosedForm::Coherent { mean_n }
            | ClosedForm::Thermal { mean_n }
            | ClosedForm::SqueezedVacuum { mean_n } => mean_n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::Fock { .. } => "fock",
            ClosedForm::Coherent { .. } => "coherent",
            ClosedForm::Thermal { .. } => "thermal",
            ClosedForm::SqueezedVacuum { .. } => "squeezed_vacuum",
        }
    }
}

pub fn spectrum_closed_form<T: Real>(
    family: ClosedForm<T>,
    g: &Coupling<T>,
    k_range: KRange,
) -> Result<ElectronSpectrum<T>> {
    let mean = family.mean_n();
    if !(mean >= T::zero()) || !mean.is_finite() {
        return Err(Error::invalid(format!("mean photon number {mean} must be finite and non-negative")));
    }
    if let ClosedForm::Coherent { mean_n } = family {
        if mean_n <= T::zero() {
            return Err(Error::invalid("coherent correction needs ⟨n⟩ > 0"));
        }
    }
    let beta = g.beta(mean);
    let mut k_half = match k_range {
        KRange::Auto => auto_k(beta.f64()),
        KRange::Symmetric(k) => k,
    };
    loop {
        let half = half_spectrum(family, beta, k_half)?;
        let probs: Vec<T> = (-(k_half as i64)..=k_half as i64).map(|k| half[k.unsigned_abs() as usize]).collect();
        let check = check_window(T::one(), &probs);
        if window_ok::<T>(&check, SPEC_TOL) || matches!(k_range, KRange::Symmetric(_)) || k_half > 4096 {
            let probs = probs.into_iter().map(|p| p.max(T::zero())).collect();
            return Ok(ElectronSpectrum::raw(-(k_half as i64), probs, T::lit(check.leakage), Engine::ClosedForm, *g)
                .with_label(family.name()));
        }
        k_half *= 2;
    }
}

/// P_0..P_K of a family at strength β.
fn half_spectrum<T: Real>(family: ClosedForm<T>, beta: T, k_half: usize) -> Result<Vec<T>> {
    let two = T::lit(2.0);
    Ok(match family {
        ClosedForm::Fock { .. } => bessel_j_seq(two * beta, k_half).into_iter().map(|j| j * j).collect(),
        ClosedForm::Coherent { mean_n } => {
            let j = bessel_j_seq(two * beta, k_half + 1);
            (0..=k_half).map(|k| j[k] * j[k] + coherent_correction(k, beta, j[k], j[k + 1]) / mean_n).collect()
        }
        ClosedForm::Thermal { .. } => bessel_i_scaled_seq(two * beta * beta, k_half),
        ClosedForm::SqueezedVacuum { .. } => {
            (0..=k_half).map(|k| squeezed_vacuum_peak(k, beta)).collect::<Result<Vec<T>>>()?
        }
    })
}

/// F(β) for |k|: β²J_{k+1}² + (k(k−1)/2 − β²)J_k² − β(k−1)J_kJ_{k+1}, evaluated at 2β.
fn coherent_correction<T: Real>(k: usize, beta: T, jk: T, jk1: T) -> T {
    let kf = T::of(k);
    let b2 = beta * beta;
    b2 * jk1 * jk1 + (kf * (kf - T::one()) / T::lit(2.0) - b2) * jk * jk - beta * (kf - T::one()) * jk * jk1
}

/// Squeezed-vacuum peak P_{±k}:
/// 2^k β^{2k} Γ(½+k)/(√π (k!)²) ₂F₂(½+k, ½+k; 1+k, 1+2k; −8β²).
///
/// The series cancels badly for large 8β², so past the precision-dependent
/// threshold the equivalent Gaussian average ∫ φ(s) J_k²(2βs) ds is used.
pub fn squeezed_vacuum_peak<T: Real>(k: usize, beta: T) -> Result<T> {
    let z = T::lit(8.0) * beta * beta;
    let threshold = (1e-8 / T::epsilon().f64()).ln().max(0.0);
    if z.f64() <= threshold {
        let kf = T::of(k);
        let half = T::lit(0.5);
        let ln_pref = kf * T::LN_2() + two_k_ln(beta, k) + ln_gamma(half + kf)
            - half * T::PI().ln()
            - T::lit(2.0) * ln_factorial::<T>(k);
        let f = hyp2f2_series(half + kf, half + kf, T::one() + kf, T::one() + T::lit(2.0) * kf, -z)?;
        Ok(ln_pref.exp() * f)
    } else {
        Ok(gaussian_average(k, beta))
    }
}

fn two_k_ln<T: Real>(beta: T, k: usize) -> T {
    if k == 0 {
        T::zero()
    } else {
        T::lit(2.0) * T::of(k) * beta.ln()
    }
}

/// ∫ φ(s) J_k(2βs)² ds over the real line by the trapezoid rule on the even half.
fn gaussian_average<T: Real>(k: usize, beta: T) -> T {
    let bf = beta.f64();
    let h = (0.25 / (bf + 1.0)).min(0.02);
    let steps = (9.0 / h).ceil() as usize;
    let norm = (2.0 / std::f64::consts::PI).sqrt();
    let mut sum = 0.0;
    for i in 0..=steps {
        let s = i as f64 * h;
        let j = bessel_j_seq(2.0 * bf * s, k)[k];
        let w = if i == 0 { 0.5 } else { 1.0 };
        sum += w * (-0.5 * s * s).exp() * j * j;
    }
    T::lit(norm * h * sum)
}
