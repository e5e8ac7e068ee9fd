use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use super::statistics::PhotonStatistics;
use crate::{Error, Real, Result};

/// Storage of ρ: dense, or diagonal for states without coherences.
#[derive(Debug, Clone, PartialEq)]
pub enum Density<T> {
    Diagonal(Vec<T>),
    Dense(CMatrix<T>),
}

/// Density matrix of one optical mode on the Fock basis |0⟩..|cutoff−1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicState<T> {
    density: Density<T>,
    label: String,
    tail_mass: T,
}

const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;

impl<T: Real> PhotonicState<T> {
    /// Internal constructor for analytically built states (already Hermitian and PSD).
    pub(crate) fn built(density: Density<T>, label: impl Into<String>, tail_mass: T) -> Self {
        PhotonicState { density, label: label.into(), tail_mass }
    }

    /// Ingest an arbitrary density matrix: symmetrized, then trace and positivity checked.
    pub fn from_matrix(mut matrix: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        matrix.hermitize();
        let tr = matrix.trace().f64();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} is not 1")));
        }
        let min = matrix.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::invalid(format!("density matrix has negative eigenvalue {min:.3e}")));
        }
        Ok(PhotonicState { density: Density::Dense(matrix), label: label.into(), tail_mass: T::zero() })
    }

    /// Diagonal (incoherent) state from photon statistics.
    pub fn from_statistics(stats: &PhotonStatistics<T>, label: impl Into<String>) -> Self {
        let p = stats.probs().to_vec();
        let tail = (T::one() - p.iter().cloned().sum::<T>()).max(T::zero());
        PhotonicState { density: Density::Diagonal(p), label: label.into(), tail_mass: tail }
    }

    /// Pure state |ψ⟩⟨ψ| from (possibly unnormalized) amplitudes.
    pub fn from_amplitudes(psi: &[Complex<T>], label: impl Into<String>) -> Result<Self> {
        let norm: T = psi.iter().map(|c| c.norm_sqr()).sum();
        if !(norm > T::zero()) {
            return Err(Error::invalid("zero-norm state vector"));
        }
        let s = norm.sqrt().recip();
        let psi: Vec<Complex<T>> = psi.iter().map(|c| *c * s).collect();
        Ok(PhotonicState { density: Density::Dense(CMatrix::outer(&psi)), label: label.into(), tail_mass: T::zero() })
    }

    pub fn cutoff(&self) -> usize {
        match &self.density {
            Density::Diagonal(p) => p.len(),
            Density::Dense(m) => m.dim(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Probability discarded by the truncation, recorded at construction.
    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    pub fn density(&self) -> &Density<T> {
        &self.density
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.density, Density::Diagonal(_))
    }

    /// ρ_{mn}; zero outside the cutoff.
    pub fn element(&self, m: usize, n: usize) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        match &self.density {
            Density::Diagonal(p) => {
                if m == n && m < p.len() {
                    Complex::new(p[m], T::zero())
                } else {
                    zero
                }
            }
            Density::Dense(mat) => {
                if m < mat.dim() && n < mat.dim() {
                    mat.get(m, n)
                } else {
                    zero
                }
            }
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        match &self.density {
            Density::Diagonal(p) => p.clone(),
            Density::Dense(m) => m.diagonal(),
        }
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        match &self.density {
            Density::Dense(m) => m.clone(),
            Density::Diagonal(p) => {
                let mut m = CMatrix::zeros(p.len());
                for (i, v) in p.iter().enumerate() {
                    m.set(i, i, Complex::new(*v, T::zero()));
                }
                m
            }
        }
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().sum()
    }

    pub fn purity(&self) -> T {
        match &self.density {
            Density::Diagonal(p) => p.iter().map(|v| *v * *v).sum(),
            Density::Dense(m) => m.purity(),
        }
    }

    pub fn mean_photon_number(&self) -> T {
        self.diagonal().iter().enumerate().map(|(n, p)| T::of(n) * *p).sum()
    }

    /// ⟨a⟩ = Σ √n ρ_{n,n−1}
    pub fn expect_a(&self) -> Complex<T> {
        let mut s = Complex::new(T::zero(), T::zero());
        if let Density::Dense(m) = &self.density {
            for n in 1..m.dim() {
                s += m.get(n, n - 1) * T::of(n).sqrt();
            }
        }
        s
    }

    /// ⟨a²⟩ = Σ √(n(n−1)) ρ_{n,n−2}
    pub fn expect_a2(&self) -> Complex<T> {
        let mut s = Complex::new(T::zero(), T::zero());
        if let Density::Dense(m) = &self.density {
            for n in 2..m.dim() {
                s += m.get(n, n - 2) * T::of(n * (n - 1)).sqrt();
            }
        }
        s
    }

    /// State with the Fock basis extended (zero padded) or truncated to `cutoff`.
    pub fn resized(&self, cutoff: usize) -> Self {
        let density = match &self.density {
            Density::Diagonal(p) => {
                let mut q = p.clone();
                q.resize(cutoff, T::zero());
                Density::Diagonal(q)
            }
            Density::Dense(m) => Density::Dense(m.resized(cutoff)),
        };
        PhotonicState { density, label: self.label.clone(), tail_mass: self.tail_mass }
    }

    pub fn to_record(&self) -> StateRecord {
        let matrix = match &self.density {
            Density::Diagonal(_) => None,
            Density::Dense(m) => Some(m.data().iter().flat_map(|c| [c.re.f64(), c.im.f64()]).collect()),
        };
        StateRecord {
            cutoff: self.cutoff(),
            label: self.label.clone(),
            diag: self.diagonal().iter().map(|v| v.f64()).collect(),
            matrix,
        }
    }

    pub fn from_record(rec: &StateRecord) -> Result<Self> {
        if rec.diag.len() != rec.cutoff {
            return Err(Error::Format(format!("diag has {} entries, cutoff is {}", rec.diag.len(), rec.cutoff)));
        }
        match &rec.matrix {
            None => {
                let p: Vec<T> = rec.diag.iter().map(|v| T::lit(*v)).collect();
                let stats = PhotonStatistics::new(p)?;
                Ok(PhotonicState::from_statistics(&stats, rec.label.clone()))
            }
            Some(flat) => {
                if flat.len() != 2 * rec.cutoff * rec.cutoff {
                    return Err(Error::Format("matrix must hold 2·cutoff² interleaved values".into()));
                }
                let data = flat.chunks(2).map(|c| Complex::new(T::lit(c[0]), T::lit(c[1]))).collect();
                PhotonicState::from_matrix(CMatrix::from_vec(rec.cutoff, data), rec.label.clone())
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: StateRecord = serde_json::from_str(s)?;
        Self::from_record(&rec)
    }
}

/// Serialized form: `matrix` holds interleaved re/im values, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateRecord {
    pub cutoff: usize,
    pub label: String,
    pub diag: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<f64>>,
}
