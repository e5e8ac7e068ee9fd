use super::state::PhotonicState;
use crate::special::ln_factorial;
use crate::{Error, Real, Result};

/// Photon-number distribution p_n, n = 0..len.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStatistics<T> {
    probs: Vec<T>,
}

const ENTRY_SLACK: f64 = 1e-12;
const SUM_LOW: f64 = 1e-8;
const SUM_HIGH: f64 = 1e-9;

impl<T: Real> PhotonStatistics<T> {
    /// Checked constructor: entries in [−1e-12, 1], total within [1 − 1e-8, 1 + 1e-9].
    pub fn new(probs: Vec<T>) -> Result<Self> {
        for (n, p) in probs.iter().enumerate() {
            let v = p.f64();
            if !(-ENTRY_SLACK..=1.0 + ENTRY_SLACK).contains(&v) {
                return Err(Error::invalid(format!("p_{n} = {v} outside [0, 1]")));
            }
        }
        let total: f64 = probs.iter().map(|p| p.f64()).sum();
        let slack = if T::epsilon().f64() > 1e-10 { 1e-5 } else { 0.0 };
        if total < 1.0 - SUM_LOW - slack || total > 1.0 + SUM_HIGH + slack {
            return Err(Error::invalid(format!("photon statistics sum to {total}")));
        }
        Ok(PhotonStatistics { probs })
    }

    pub(crate) fn unchecked(probs: Vec<T>) -> Self {
        PhotonStatistics { probs }
    }

    /// Normalize non-negative weights into a distribution.
    pub fn from_weights(mut w: Vec<T>) -> Result<Self> {
        let total: T = w.iter().cloned().sum();
        if !(total > T::zero()) {
            return Err(Error::invalid("weights have no mass"));
        }
        for v in w.iter_mut() {
            *v = (*v / total).max(T::zero());
        }
        Ok(PhotonStatistics { probs: w })
    }

    pub fn poisson(mean: T, len: usize) -> Self {
        let mut p = vec![T::zero(); len];
        if mean == T::zero() {
            if len > 0 {
                p[0] = T::one();
            }
            return PhotonStatistics { probs: p };
        }
        let ln_mean = mean.ln();
        for (n, v) in p.iter_mut().enumerate() {
            *v = (T::of(n) * ln_mean - mean - ln_factorial::<T>(n)).exp();
        }
        PhotonStatistics { probs: p }
    }

    pub fn thermal(mean: T, len: usize) -> Self {
        let q = mean / (mean + T::one());
        let p0 = (mean + T::one()).recip();
        let mut p = vec![T::zero(); len];
        let mut cur = p0;
        for v in p.iter_mut() {
            *v = cur;
            cur *= q;
        }
        PhotonStatistics { probs: p }
    }

    pub fn fock(n: usize, len: usize) -> Self {
        let mut p = vec![T::zero(); len.max(n + 1)];
        p[n] = T::one();
        PhotonStatistics { probs: p }
    }

    /// Squeezed vacuum law p_{2m} = (N/(N+1))^m (2m)! / (√(N+1) 4^m (m!)²), odd entries zero.
    pub fn squeezed_vacuum(mean: T, len: usize) -> Self {
        let mut p = vec![T::zero(); len];
        let ln_q = if mean > T::zero() { (mean / (mean + T::one())).ln() } else { T::neg_infinity() };
        let pre = -T::lit(0.5) * (mean + T::one()).ln();
        for m in 0..len.div_ceil(2) {
            let lm = if m == 0 {
                pre
            } else {
                pre + T::of(m) * ln_q + ln_factorial::<T>(2 * m)
                    - T::of(2 * m) * T::LN_2()
                    - T::lit(2.0) * ln_factorial::<T>(m)
            };
            p[2 * m] = lm.exp();
        }
        PhotonStatistics { probs: p }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, n: usize) -> T {
        self.probs.get(n).cloned().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.probs.iter().cloned().sum()
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn moment(&self, m: u32) -> T {
        self.probs.iter().enumerate().map(|(n, p)| *p * T::of(n).powi(m as i32)).sum()
    }

    pub fn variance(&self) -> T {
        let mu = self.mean();
        self.moment(2) - mu * mu
    }

    pub fn moments(&self, order: usize) -> MomentVector<T> {
        moments(self, order)
    }

    /// max_n |p_n − q_n| over the union of supports.
    pub fn max_abs_diff(&self, other: &PhotonStatistics<T>) -> T {
        let len = self.len().max(other.len());
        (0..len).map(|n| (self.get(n) - other.get(n)).abs()).fold(T::zero(), T::max)
    }

    /// Total-variation distance ½ Σ |p_n − q_n|.
    pub fn tv_distance(&self, other: &PhotonStatistics<T>) -> T {
        let len = self.len().max(other.len());
        T::lit(0.5) * (0..len).map(|n| (self.get(n) - other.get(n)).abs()).sum::<T>()
    }

    /// Drop the trailing entries beyond the last value above `floor`.
    pub fn trimmed(&self, floor: T) -> Self {
        let last = self.probs.iter().rposition(|p| *p > floor).map(|i| i + 1).unwrap_or(1);
        PhotonStatistics { probs: self.probs[..last.max(1)].to_vec() }
    }
}

/// Photon-number moments ⟨n^m⟩, m = 1..order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T> {
    values: Vec<T>,
}

impl<T: Real> MomentVector<T> {
    pub fn new(values: Vec<T>) -> Self {
        MomentVector { values }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// ⟨n^m⟩ for 1 ≤ m ≤ order.
    pub fn get(&self, m: usize) -> T {
        assert!(m >= 1 && m <= self.values.len(), "moment order out of range");
        self.values[m - 1]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// ⟨n^m⟩² ≤ ⟨n^{m−1}⟩⟨n^{m+1}⟩ with ⟨n^0⟩ = 1, up to relative slack `rtol`.
    pub fn is_log_convex(&self, rtol: T) -> bool {
        let at = |m: usize| if m == 0 { T::one() } else { self.values[m - 1] };
        (1..self.values.len()).all(|m| {
            let lhs = at(m) * at(m);
            let rhs = at(m - 1) * at(m + 1);
            lhs <= rhs * (T::one() + rtol) + T::min_positive_value()
        })
    }

    /// Relative deviation |a_m − b_m| / |b_m| per order.
    pub fn relative_error(&self, truth: &MomentVector<T>) -> Vec<T> {
        self.values.iter().zip(&truth.values).map(|(a, b)| ((*a - *b) / *b).abs()).collect()
    }
}

/// p_n = ⟨n|ρ|n⟩
pub fn statistics<T: Real>(state: &PhotonicState<T>) -> PhotonStatistics<T> {
    PhotonStatistics::unchecked(state.diagonal())
}

/// Exact weighted power sums Σ p_n n^m for m = 1..order.
pub fn moments<T: Real>(stats: &PhotonStatistics<T>, order: usize) -> MomentVector<T> {
    assert!(order >= 1, "moment order must be at least 1");
    let mut acc = vec![T::zero(); order];
    for (n, p) in stats.probs().iter().enumerate() {
        let nf = T::of(n);
        let mut w = *p;
        for a in acc.iter_mut() {
            w *= nf;
            *a += w;
        }
    }
    MomentVector::new(acc)
}
