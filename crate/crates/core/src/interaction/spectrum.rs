use serde::{Deserialize, Serialize};

use super::coupling::Coupling;
use crate::fockspace::{PhotonStatistics, PhotonicState};
use crate::{Error, Real, Result};

/// Which computation produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    Approx,
    ClosedForm,
    Oracle,
    Sampled,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Approx => "approx",
            Engine::ClosedForm => "closed_form",
            Engine::Oracle => "oracle",
            Engine::Sampled => "sampled",
        }
    }
}

/// Ladder window request: automatic, or a fixed symmetric half-width |k| ≤ K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KRange {
    #[default]
    Auto,
    Symmetric(usize),
}

/// Electron energy-loss spectrum P_k on k_min..=k_max (k > 0: photons absorbed).
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronSpectrum<T> {
    k_min: i64,
    probs: Vec<T>,
    leakage: T,
    engine: Engine,
    g: Option<Coupling<T>>,
    state_label: String,
}

/// Serialized form of a spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub k_min: i64,
    pub k_max: i64,
    pub probs: Vec<f64>,
    pub leakage: f64,
    pub engine: Engine,
    pub g: Option<Coupling<f64>>,
    pub state_label: String,
}

impl<T: Real> ElectronSpectrum<T> {
    pub fn new(k_min: i64, probs: Vec<T>, leakage: T, engine: Engine) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.f64() >= -1e-12)) {
            return Err(Error::invalid(format!("P_{} = {} is negative", k_min + i as i64, p)));
        }
        Ok(ElectronSpectrum { k_min, probs, leakage, engine, g: None, state_label: String::new() })
    }

    pub(crate) fn raw(k_min: i64, probs: Vec<T>, leakage: T, engine: Engine, g: Coupling<T>) -> Self {
        ElectronSpectrum { k_min, probs, leakage, engine, g: Some(g), state_label: String::new() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.state_label = label.into();
        self
    }

    pub fn with_coupling(mut self, g: Coupling<T>) -> Self {
        self.g = Some(g);
        self
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.probs.len() as i64 - 1
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> + '_ {
        self.k_min..=self.k_max()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn leakage(&self) -> T {
        self.leakage
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn coupling(&self) -> Option<Coupling<T>> {
        self.g
    }

    pub fn label(&self) -> &str {
        &self.state_label
    }

    /// P_k, zero outside the stored window.
    pub fn get(&self, k: i64) -> T {
        if k < self.k_min || k > self.k_max() {
            T::zero()
        } else {
            self.probs[(k - self.k_min) as usize]
        }
    }

    pub fn total(&self) -> T {
        self.probs.iter().cloned().sum()
    }

    /// Σ k P_k: mean number of photons absorbed.
    pub fn mean_k(&self) -> T {
        self.ks().zip(self.probs.iter()).map(|(k, p)| T::of_i(k) * *p).sum()
    }

    /// Σ k^m P_k
    pub fn moment(&self, m: u32) -> T {
        self.ks().zip(self.probs.iter()).map(|(k, p)| T::of_i(k).powi(m as i32) * *p).sum()
    }

    /// max_k |P_k − Q_k| over the union of both windows.
    pub fn max_abs_diff(&self, other: &ElectronSpectrum<T>) -> T {
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        (lo..=hi).map(|k| (self.get(k) - other.get(k)).abs()).fold(T::zero(), T::max)
    }

    /// Copy restricted to (or zero-padded to) k_min..=k_max.
    pub fn window(&self, k_min: i64, k_max: i64) -> Self {
        let probs = (k_min..=k_max).map(|k| self.get(k)).collect();
        ElectronSpectrum { k_min, probs, ..self.clone() }
    }

    pub fn to_record(&self) -> SpectrumRecord {
        SpectrumRecord {
            k_min: self.k_min,
            k_max: self.k_max(),
            probs: self.probs.iter().map(|p| p.f64()).collect(),
            leakage: self.leakage.f64(),
            engine: self.engine,
            g: self.g.map(|g| Coupling::new(g.magnitude().f64(), g.phase().f64()).expect("valid coupling")),
            state_label: self.state_label.clone(),
        }
    }

    pub fn from_record(rec: &SpectrumRecord) -> Result<Self> {
        if rec.k_max - rec.k_min + 1 != rec.probs.len() as i64 {
            return Err(Error::Format(format!(
                "k range {}..={} does not match {} probabilities",
                rec.k_min,
                rec.k_max,
                rec.probs.len()
            )));
        }
        let probs = rec.probs.iter().map(|p| T::lit(*p)).collect();
        let mut s = Self::new(rec.k_min, probs, T::lit(rec.leakage), rec.engine)?;
        s.g = match rec.g {
            Some(g) => Some(Coupling::new(T::lit(g.magnitude()), T::lit(g.phase()))?),
            None => None,
        };
        s.state_label = rec.state_label.clone();
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(s)?)
    }

    /// CSV with header `k,probability`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "probability"])?;
        for (k, p) in self.ks().zip(self.probs.iter()) {
            w.write_record([k.to_string(), crate::io::fmt_f64(p.f64())])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    /// Parse `k,probability` rows; k must be consecutive.
    pub fn from_csv(s: &str, engine: Engine) -> Result<Self> {
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let headers = r.headers()?.clone();
        if headers.len() < 2 || headers.get(0) != Some("k") || headers.get(1) != Some("probability") {
            return Err(Error::Format("expected header `k,probability`".into()));
        }
        let mut k_min = None;
        let mut probs = Vec::new();
        for (i, row) in r.records().enumerate() {
            let row = row?;
            let k: i64 = row[0].trim().parse().map_err(|_| Error::Format(format!("bad k on row {}", i + 1)))?;
            let p: f64 =
                row[1].trim().parse().map_err(|_| Error::Format(format!("bad probability on row {}", i + 1)))?;
            match k_min {
                None => k_min = Some(k),
                Some(k0) if k != k0 + i as i64 => {
                    return Err(Error::Format(format!("k values must be consecutive (row {})", i + 1)))
                }
                _ => {}
            }
            probs.push(T::lit(p));
        }
        let k_min = k_min.ok_or_else(|| Error::Format("no spectrum rows".into()))?;
        Self::new(k_min, probs, T::zero(), engine)
    }
}

/// Joint photon-number / ladder distribution P_{n,k}, n the final photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    n_len: usize,
    k_min: i64,
    k_len: usize,
    probs: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    pub(crate) fn zeros(n_len: usize, k_min: i64, k_len: usize) -> Self {
        JointDistribution { n_len, k_min, k_len, probs: vec![T::zero(); n_len * k_len] }
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.k_len as i64 - 1
    }

    /// P(n_final = n, k); zero outside the table.
    pub fn get(&self, n: usize, k: i64) -> T {
        if n >= self.n_len || k < self.k_min || k > self.k_max() {
            T::zero()
        } else {
            self.probs[n * self.k_len + (k - self.k_min) as usize]
        }
    }

    pub(crate) fn add(&mut self, n: usize, k: i64, v: T) {
        let i = n * self.k_len + (k - self.k_min) as usize;
        self.probs[i] += v;
    }

    pub fn total(&self) -> T {
        self.probs.iter().cloned().sum()
    }

    /// Σ_k P_{n,k}
    pub fn photon_marginal(&self) -> Vec<T> {
        self.probs.chunks(self.k_len).map(|row| row.iter().cloned().sum()).collect()
    }

    /// Σ_n P_{n,k}, indexed from k_min.
    pub fn ladder_marginal(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.k_len];
        for row in self.probs.chunks(self.k_len) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += *v;
            }
        }
        out
    }

    /// Unnormalized slice P_{·,k}.
    pub fn column(&self, k: i64) -> Vec<T> {
        (0..self.n_len).map(|n| self.get(n, k)).collect()
    }
}

/// Result of one electron passing the light.
#[derive(Debug, Clone)]
pub struct InteractionOutcome<T> {
    pub spectrum: ElectronSpectrum<T>,
    pub post_state_traced: PhotonicState<T>,
    pub joint: Option<JointDistribution<T>>,
}

impl<T: Real> InteractionOutcome<T> {
    /// Photon statistics after tracing out the electron.
    pub fn post_statistics(&self) -> PhotonStatistics<T> {
        PhotonStatistics::unchecked(self.post_state_traced.diagonal())
    }
}
