use num_complex::Complex;

use super::matrix::CMatrix;
use super::state::{Density, PhotonicState};
use super::statistics::PhotonStatistics;
use super::TAIL_TOL;
use crate::special::ln_factorial;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign<T: Real>(self) -> T {
        match self {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        }
    }
}

/// Heuristic Fock dimension for Poisson-like states: ⟨n⟩ + 8√⟨n⟩ + 16.
pub fn coherent_cutoff(mean_n: f64) -> usize {
    (mean_n + 8.0 * mean_n.sqrt() + 16.0).ceil() as usize + 1
}

/// Smallest dimension with thermal tail (⟨n⟩/(⟨n⟩+1))^N below `tol`.
pub fn thermal_cutoff(mean_n: f64, tol: f64) -> usize {
    if mean_n <= 0.0 {
        return 1;
    }
    let q = mean_n / (mean_n + 1.0);
    (tol.ln() / q.ln()).ceil().max(1.0) as usize
}

fn coherent_amplitudes<T: Real>(alpha: Complex<T>, len: usize) -> Vec<Complex<T>> {
    let r = alpha.norm();
    let mut out = vec![Complex::new(T::zero(), T::zero()); len];
    if r == T::zero() {
        if len > 0 {
            out[0] = Complex::new(T::one(), T::zero());
        }
        return out;
    }
    let phase = alpha / r;
    let ln_r = r.ln();
    let half = T::lit(0.5);
    let mut ph = Complex::new(T::one(), T::zero());
    for (n, c) in out.iter_mut().enumerate() {
        let lm = -half * r * r + T::of(n) * ln_r - half * ln_factorial::<T>(n);
        *c = ph * lm.exp();
        ph *= phase;
    }
    out
}

/// Σ_{n ≥ cutoff} of a Poisson law, summed directly so small tails keep their digits.
fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return if cutoff == 0 { 1.0 } else { 0.0 };
    }
    if (cutoff as f64) <= mean + 1.0 {
        let head: f64 = PhotonStatistics::<f64>::poisson(mean, cutoff).total();
        return (1.0 - head).max(0.0);
    }
    let mut s = 0.0;
    let mut n = cutoff;
    loop {
        let t = (n as f64 * mean.ln() - mean - ln_factorial::<f64>(n)).exp();
        s += t;
        if t < 1e-30 || t < s * 1e-17 {
            break;
        }
        n += 1;
    }
    s
}

fn required_poisson_cutoff(mean: f64, tol: f64) -> usize {
    let mut n = mean.floor() as usize + 1;
    while poisson_tail(mean, n) >= tol {
        n += 1 + n / 64;
    }
    while n > 1 && poisson_tail(mean, n - 1) < tol {
        n -= 1;
    }
    n
}

/// Coherent state |α⟩ truncated to `cutoff` levels.
pub fn make_coherent<T: Real>(alpha: Complex<T>, cutoff: usize) -> Result<PhotonicState<T>> {
    let mean = alpha.norm_sqr().f64();
    let tail = poisson_tail(mean, cutoff);
    if tail >= TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail,
            tol: TAIL_TOL,
            required: required_poisson_cutoff(mean, TAIL_TOL),
        });
    }
    let psi = coherent_amplitudes(alpha, cutoff);
    let label = format!("coherent(alpha={}{:+}i)", alpha.re, alpha.im);
    Ok(PhotonicState::built(Density::Dense(CMatrix::outer(&psi)), label, T::lit(tail)))
}

pub fn make_fock<T: Real>(n: usize, cutoff: usize) -> Result<PhotonicState<T>> {
    if n >= cutoff {
        return Err(Error::CutoffTooSmall { cutoff, tail: 1.0, tol: TAIL_TOL, required: n + 1 });
    }
    let stats = PhotonStatistics::fock(n, cutoff);
    Ok(PhotonicState::built(Density::Diagonal(stats.probs().to_vec()), format!("fock({n})"), T::zero()))
}

pub fn make_thermal<T: Real>(mean_n: T, cutoff: usize) -> Result<PhotonicState<T>> {
    let m = mean_n.f64();
    if !(m >= 0.0) {
        return Err(Error::invalid(format!("thermal mean photon number {m} must be non-negative")));
    }
    let tail = if m == 0.0 { 0.0 } else { (m / (m + 1.0)).powf(cutoff as f64) };
    if tail >= TAIL_TOL {
        return Err(Error::CutoffTooSmall { cutoff, tail, tol: TAIL_TOL, required: thermal_cutoff(m, TAIL_TOL) });
    }
    let stats = PhotonStatistics::thermal(mean_n, cutoff);
    Ok(PhotonicState::built(Density::Diagonal(stats.probs().to_vec()), format!("thermal(mean_n={m})"), T::lit(tail)))
}

/// Amplitudes ⟨n|D(α)S(ξ)|0⟩ with ξ = r e^{2iφ}, S(ξ) = exp(½(ξ* a² − ξ a†²)).
///
/// With z = e^{2iφ} tanh r the recurrence t_{n+1} = [(α + zα*) t_n − z√n t_{n−1}]/√(n+1)
/// generates (z/2)^{n/2} H_n(w)/√n! without branch choices; a running log-scale
/// keeps it finite for large |α|.
pub fn squeezed_amplitudes<T: Real>(alpha: Complex<T>, r: T, phi: T, len: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); len];
    if len == 0 {
        return out;
    }
    let z = Complex::from_polar(r.tanh(), T::lit(2.0) * phi);
    let lin = alpha + z * alpha.conj();
    let half = T::lit(0.5);
    // ln of (1−|z|²)^{1/4} exp(−½|α|² − ½ α*² z)
    let pre = Complex::new(T::lit(0.25) * (T::one() - z.norm_sqr()).ln(), T::zero())
        - Complex::new(half * alpha.norm_sqr(), T::zero())
        - alpha.conj() * alpha.conj() * z * half;
    let big = T::lit(T::RESCALE);
    let mut scale = T::zero();
    let mut prev = Complex::new(T::zero(), T::zero());
    let mut cur = Complex::new(T::one(), T::zero());
    out[0] = (pre + scale).exp() * cur;
    for n in 0..len - 1 {
        let nf = T::of(n);
        let next = (lin * cur - z * prev * nf.sqrt()) / (nf + T::one()).sqrt();
        prev = cur;
        cur = next;
        let mag = cur.norm().max(prev.norm());
        if mag > big || (mag < big.recip() && mag > T::zero()) {
            let s = mag.recip();
            cur *= s;
            prev *= s;
            scale += mag.ln();
        }
        out[n + 1] = (pre + scale).exp() * cur;
    }
    out
}

/// Squeezed coherent state D(α)S(ξ)|0⟩, ξ = r e^{2iφ}; φ = 0 squeezes X.
pub fn make_squeezed<T: Real>(alpha: Complex<T>, r: T, phi: T, cutoff: usize) -> Result<PhotonicState<T>> {
    if !(r >= T::zero()) {
        return Err(Error::invalid("squeezing parameter r must be non-negative"));
    }
    // tail judged in double precision whatever T is
    let a64 = Complex::new(alpha.re.f64(), alpha.im.f64());
    let (r64, phi64) = (r.f64(), phi.f64());
    let head_mass =
        |len: usize| -> f64 { squeezed_amplitudes(a64, r64, phi64, len).iter().map(|c| c.norm_sqr()).sum() };
    let tail = (1.0 - head_mass(cutoff)).max(0.0);
    if tail >= TAIL_TOL {
        let mut need = cutoff.max(16);
        while 1.0 - head_mass(need) >= TAIL_TOL && need < 50_000_000 {
            need = need * 3 / 2;
        }
        return Err(Error::CutoffTooSmall { cutoff, tail, tol: TAIL_TOL, required: need });
    }
    let psi = squeezed_amplitudes(alpha, r, phi, cutoff);
    let label = format!("squeezed(alpha={}{:+}i,r={},phi={})", alpha.re, alpha.im, r, phi);
    Ok(PhotonicState::built(Density::Dense(CMatrix::outer(&psi)), label, T::lit(tail)))
}

/// Normalized superposition |α⟩ ± |−α⟩.
pub fn make_cat<T: Real>(alpha: Complex<T>, parity: Parity, cutoff: usize) -> Result<PhotonicState<T>> {
    if alpha.norm() == T::zero() && parity == Parity::Odd {
        return Err(Error::invalid("odd cat with alpha = 0 has zero norm"));
    }
    let mean = alpha.norm_sqr().f64();
    let overlap = (-2.0 * mean).exp();
    let s = parity.sign::<f64>();
    let poisson = poisson_tail(mean, cutoff);
    let tail = 2.0 * poisson / (1.0 + s * overlap);
    if tail >= TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail,
            tol: TAIL_TOL,
            required: required_poisson_cutoff(mean, TAIL_TOL / 2.0),
        });
    }
    let c = coherent_amplitudes(alpha, cutoff);
    let sign = parity.sign::<T>();
    let norm = (T::lit(2.0) * (T::one() + sign * T::lit(overlap))).sqrt().recip();
    let psi: Vec<Complex<T>> = c
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let flip = if n % 2 == 0 { T::one() } else { -T::one() };
            *v * ((T::one() + sign * flip) * norm)
        })
        .collect();
    let tag = if parity == Parity::Even { "even" } else { "odd" };
    let label = format!("cat(alpha={}{:+}i,{tag})", alpha.re, alpha.im);
    Ok(PhotonicState::built(Density::Dense(CMatrix::outer(&psi)), label, T::lit(tail)))
}

/// Classical mixture ½(|α⟩⟨α| + |−α⟩⟨−α|).
pub fn make_mixed_pair<T: Real>(alpha: Complex<T>, cutoff: usize) -> Result<PhotonicState<T>> {
    let mean = alpha.norm_sqr().f64();
    let tail = poisson_tail(mean, cutoff);
    if tail >= TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail,
            tol: TAIL_TOL,
            required: required_poisson_cutoff(mean, TAIL_TOL),
        });
    }
    let plus = coherent_amplitudes(alpha, cutoff);
    let minus = coherent_amplitudes(-alpha, cutoff);
    let mut m = CMatrix::outer(&plus);
    m.scale(T::lit(0.5));
    m.add_scaled(&CMatrix::outer(&minus), T::lit(0.5));
    let label = format!("mixed_pair(alpha={}{:+}i)", alpha.re, alpha.im);
    Ok(PhotonicState::built(Density::Dense(m), label, T::lit(tail)))
}
