pub mod experiment;
pub mod hbt;
pub mod reconstruct;
pub mod spectrum;
pub mod tomography;

use qpinem::interaction::{Coupling, ElectronSpectrum};
use qpinem::io::fmt_f64;
use qpinem::{Error, Result};

pub fn coupling(g: f64, phase: f64) -> Result<Coupling<f64>> {
    Coupling::new(g, phase)
}

/// Long CSV `<key>,k,probability` over several spectra.
pub fn long_csv(key: &str, rows: &[(f64, &ElectronSpectrum<f64>)]) -> Result<String> {
    let mut out = format!("{key},k,probability\n");
    for (v, s) in rows {
        for (k, p) in s.ks().zip(s.probs()) {
            out.push_str(&format!("{},{k},{}\n", fmt_f64(*v), fmt_f64(*p)));
        }
    }
    Ok(out)
}

pub fn list<T: std::str::FromStr>(s: &Option<String>, what: &str) -> Result<Option<Vec<T>>>
where
    T::Err: std::fmt::Display,
{
    match s {
        None => Ok(None),
        Some(s) => crate::config::parse_list(s).map(Some).map_err(|e| Error::invalid(format!("--{what}: {e}"))),
    }
}

/// Spectra on a common k window as rows for a heatmap.
pub fn spectra_matrix(spectra: &[&ElectronSpectrum<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let lo = spectra.iter().map(|s| s.k_min()).min().unwrap_or(0);
    let hi = spectra.iter().map(|s| s.k_max()).max().unwrap_or(0);
    let ks: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
    let rows = spectra.iter().map(|s| (lo..=hi).map(|k| s.get(k)).collect()).collect();
    (ks, rows)
}
