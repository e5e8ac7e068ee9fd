use serde::Serialize;

use super::kernel::{KernelInfo, MomentKernel};
use crate::fockspace::MomentVector;
use crate::interaction::ElectronSpectrum;
use crate::{Error, Real, Result};

/// How many peaks each moment uses: the smallest K whose remainder
/// Σ_{k>K} |d_mk P_k| over the available peaks is below `rtol` of the running
/// estimate. Peaks at or below `noise_floor` are not available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakPolicy {
    pub rtol: f64,
    pub noise_floor: f64,
}

impl Default for PeakPolicy {
    fn default() -> Self {
        PeakPolicy { rtol: 1e-3, noise_floor: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentStatus {
    Ok,
    /// The remainder bound was only met by running out of peaks.
    Unconverged,
    /// ⟨n⟩ came out negative: the spectrum is dominated by noise.
    NoiseDominated,
}

#[derive(Debug, Clone)]
pub struct MomentEstimate<T> {
    pub moments: MomentVector<T>,
    /// Truncation remainder estimate per moment.
    pub errors_est: Vec<T>,
    /// Last peak index used per moment.
    pub peaks_used: Vec<usize>,
    pub status: MomentStatus,
    /// Same inversion on the emission side P_{−k}, as a cross-check.
    pub negative_k: MomentVector<T>,
    pub kernel: KernelInfo,
}

#[derive(Serialize)]
struct MomentRecord<'a> {
    moments: Vec<f64>,
    errors_est: Vec<f64>,
    peaks_used: &'a [usize],
    negative_k_moments: Vec<f64>,
    status: MomentStatus,
    method: &'static str,
    kernel: &'a KernelInfo,
}

impl<T: Real> MomentEstimate<T> {
    pub fn to_json(&self) -> Result<String> {
        let rec = MomentRecord {
            moments: self.moments.values().iter().map(|v| v.f64()).collect(),
            errors_est: self.errors_est.iter().map(|v| v.f64()).collect(),
            peaks_used: &self.peaks_used,
            negative_k_moments: self.negative_k.values().iter().map(|v| v.f64()).collect(),
            status: self.status,
            method: "kernel",
            kernel: &self.kernel,
        };
        Ok(serde_json::to_string_pretty(&rec)?)
    }
}

struct Side<T> {
    moments: Vec<T>,
    errors: Vec<T>,
    used: Vec<usize>,
    converged: bool,
}

fn invert_side<T: Real>(
    peak: impl Fn(usize) -> T,
    avail: usize,
    kernel: &MomentKernel<T>,
    policy: &PeakPolicy,
) -> Side<T> {
    let rtol = T::lit(policy.rtol);
    let mut side = Side { moments: Vec::new(), errors: Vec::new(), used: Vec::new(), converged: true };
    for m in 1..=kernel.order() {
        if avail < m {
            side.moments.push(T::zero());
            side.errors.push(T::zero());
            side.used.push(avail);
            continue;
        }
        let terms: Vec<T> = (m..=avail).map(|k| kernel.d(m, k) * peak(k)).collect();
        // suffix sums of |terms|: remainder after each cut
        let mut rem = vec![T::zero(); terms.len() + 1];
        for i in (0..terms.len()).rev() {
            rem[i] = rem[i + 1] + terms[i].abs();
        }
        let mut s = T::zero();
        let mut cut = terms.len() - 1;
        for (i, t) in terms.iter().enumerate() {
            s += *t;
            if rem[i + 1] <= rtol * s.abs() {
                cut = i;
                break;
            }
        }
        let last = terms[cut].abs();
        if cut + 1 == terms.len() && terms.len() > 1 && last > rtol * s.abs() {
            side.converged = false;
        }
        side.moments.push(s);
        side.errors.push(if rem[cut + 1] > T::zero() { rem[cut + 1] } else { last * rtol });
        side.used.push(m + cut);
    }
    side
}

/// ⟨n^m⟩ = Σ_{k=m..K} d_mk P_k from the absorption side of the spectrum.
pub fn moments_from_spectrum<T: Real>(
    spectrum: &ElectronSpectrum<T>,
    kernel: &MomentKernel<T>,
    policy: &PeakPolicy,
) -> Result<MomentEstimate<T>> {
    let order = kernel.order();
    if spectrum.k_max() < order as i64 {
        return Err(Error::invalid(format!(
            "spectrum ends at k = {} but order {order} needs peaks up to at least k = {order}",
            spectrum.k_max()
        )));
    }
    let floor = T::lit(policy.noise_floor);
    let avail_for = |sign: i64| -> usize {
        let top =
            (kernel.peaks() as i64).min(if sign > 0 { spectrum.k_max() } else { -spectrum.k_min() }).max(0) as usize;
        (1..=top).rev().find(|&k| spectrum.get(sign * k as i64) > floor).unwrap_or(0)
    };
    let pos = invert_side(|k| spectrum.get(k as i64), avail_for(1), kernel, policy);
    let neg = invert_side(|k| spectrum.get(-(k as i64)), avail_for(-1), kernel, policy);

    // a window that cuts off peaks the kernel still needs
    let k_end = spectrum.k_max();
    if (k_end as usize) < kernel.peaks() && spectrum.get(k_end) > floor {
        for m in 1..=order {
            let tail = (kernel.d(m, k_end as usize) * spectrum.get(k_end)).abs();
            if tail > T::lit(policy.rtol) * pos.moments[m - 1].abs() {
                return Err(Error::invalid(format!(
                    "spectrum truncated at k = {k_end}: the last peak still contributes {:.3e} to ⟨n^{m}⟩",
                    tail.f64()
                )));
            }
        }
    }
    let status = if pos.moments[0] < T::zero() {
        MomentStatus::NoiseDominated
    } else if !pos.converged {
        MomentStatus::Unconverged
    } else {
        MomentStatus::Ok
    };
    Ok(MomentEstimate {
        moments: MomentVector::new(pos.moments),
        errors_est: pos.errors,
        peaks_used: pos.used,
        status,
        negative_k: MomentVector::new(neg.moments),
        kernel: kernel.info(),
    })
}
