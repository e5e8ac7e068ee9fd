use serde::{Deserialize, Serialize};

use qpinem::fockspace::{
    coherent_cutoff, make_cat, make_coherent, make_fock, make_mixed_pair, make_squeezed, make_thermal, statistics,
    thermal_cutoff, Parity, PhotonStatistics, PhotonicState, TAIL_TOL,
};
use qpinem::interaction::ClosedForm;
use qpinem::{Complex64, Error, Result};

/// Photonic state as named on the command line or in the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSpec {
    /// vacuum | fock | coherent | thermal | squeezed-vacuum | squeezed | cat-even | cat-odd | mixed
    pub family: String,
    pub mean_n: Option<f64>,
    pub n: Option<usize>,
    /// |α|
    pub alpha: Option<f64>,
    /// arg α
    pub phase: f64,
    pub r: Option<f64>,
    pub cutoff: Option<usize>,
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec { family: "coherent".into(), mean_n: None, n: None, alpha: None, phase: 0.0, r: None, cutoff: None }
    }
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct StateArgs {
    /// vacuum, fock, coherent, thermal, squeezed-vacuum, squeezed, cat-even, cat-odd, mixed
    #[arg(long = "state")]
    pub family: Option<String>,
    #[arg(long)]
    pub mean_n: Option<f64>,
    /// Fock number.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coherent amplitude |α|.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Phase of α in radians.
    #[arg(long)]
    pub phase: Option<f64>,
    /// Squeezing parameter.
    #[arg(long)]
    pub r: Option<f64>,
    /// Fock-space dimension (default: chosen from the state).
    #[arg(long)]
    pub cutoff: Option<usize>,
}

impl StateSpec {
    pub fn overlay(&mut self, a: &StateArgs) {
        if let Some(f) = &a.family {
            self.family = f.clone();
        }
        if a.mean_n.is_some() {
            self.mean_n = a.mean_n;
        }
        if a.n.is_some() {
            self.n = a.n;
        }
        if a.alpha.is_some() {
            self.alpha = a.alpha;
        }
        if let Some(p) = a.phase {
            self.phase = p;
        }
        if a.r.is_some() {
            self.r = a.r;
        }
        if a.cutoff.is_some() {
            self.cutoff = a.cutoff;
        }
    }

    fn need<T: Copy>(&self, v: Option<T>, what: &str) -> Result<T> {
        v.ok_or_else(|| Error::invalid(format!("state '{}' needs --{what}", self.family)))
    }

    fn amplitude(&self) -> Result<Complex64> {
        let a = match (self.alpha, self.mean_n) {
            (Some(a), _) => a,
            (None, Some(m)) if m >= 0.0 => m.sqrt(),
            _ => return Err(Error::invalid(format!("state '{}' needs --alpha or --mean-n", self.family))),
        };
        if !(a >= 0.0) {
            return Err(Error::invalid("--alpha is the modulus |α| and must be non-negative"));
        }
        Ok(Complex64::from_polar(a, self.phase))
    }

    fn squeeze(&self) -> Result<f64> {
        match (self.r, self.mean_n) {
            (Some(r), _) => Ok(r),
            (None, Some(m)) if m >= 0.0 => Ok(m.sqrt().asinh()),
            _ => Err(Error::invalid(format!("state '{}' needs --r or --mean-n", self.family))),
        }
    }

    /// Mean photon number implied by the parameters.
    pub fn mean(&self) -> Result<f64> {
        Ok(match self.family.as_str() {
            "vacuum" => 0.0,
            "fock" => self.n.unwrap_or(0) as f64,
            "coherent" => self.amplitude()?.norm_sqr(),
            "thermal" => self.need(self.mean_n, "mean-n")?,
            "squeezed-vacuum" => self.squeeze()?.sinh().powi(2),
            _ => self.build()?.mean_photon_number(),
        })
    }

    fn with_cutoff<F>(&self, default: usize, make: F) -> Result<PhotonicState<f64>>
    where
        F: Fn(usize) -> Result<PhotonicState<f64>>,
    {
        match make(self.cutoff.unwrap_or(default)) {
            Err(Error::CutoffTooSmall { required, .. }) if self.cutoff.is_none() => make(required),
            other => other,
        }
    }

    pub fn build(&self) -> Result<PhotonicState<f64>> {
        match self.family.as_str() {
            "vacuum" => make_fock(0, self.cutoff.unwrap_or(1)),
            "fock" => {
                let n = self.n.unwrap_or(0);
                make_fock(n, self.cutoff.unwrap_or(n + 1))
            }
            "coherent" => {
                let a = self.amplitude()?;
                self.with_cutoff(coherent_cutoff(a.norm_sqr()), |c| make_coherent(a, c))
            }
            "thermal" => {
                let m = self.need(self.mean_n, "mean-n")?;
                self.with_cutoff(thermal_cutoff(m, 1e-11), |c| make_thermal(m, c))
            }
            "squeezed-vacuum" => {
                let r = self.squeeze()?;
                self.with_cutoff(64, |c| make_squeezed(Complex64::new(0.0, 0.0), r, 0.0, c))
            }
            "squeezed" => {
                let a = self.amplitude()?;
                let r = self.need(self.r, "r")?;
                let m = a.norm_sqr() + r.sinh().powi(2);
                self.with_cutoff(coherent_cutoff(m) + 32, |c| make_squeezed(a, r, 0.0, c))
            }
            "cat-even" | "cat-odd" => {
                let a = self.amplitude()?;
                let parity = if self.family == "cat-even" { Parity::Even } else { Parity::Odd };
                self.with_cutoff(coherent_cutoff(a.norm_sqr()), |c| make_cat(a, parity, c))
            }
            "mixed" => {
                let a = self.amplitude()?;
                self.with_cutoff(coherent_cutoff(a.norm_sqr()), |c| make_mixed_pair(a, c))
            }
            other => Err(Error::invalid(format!(
                "unknown state family '{other}' (expected vacuum, fock, coherent, thermal, squeezed-vacuum, squeezed, cat-even, cat-odd or mixed)"
            ))),
        }
    }

    /// Photon statistics, built directly for the diagonal families.
    pub fn statistics(&self) -> Result<PhotonStatistics<f64>> {
        match self.family.as_str() {
            "coherent" => {
                let m = self.amplitude()?.norm_sqr();
                self.truncated(coherent_cutoff(m), |c| PhotonStatistics::poisson(m, c))
            }
            "thermal" => {
                let m = self.need(self.mean_n, "mean-n")?;
                self.truncated(thermal_cutoff(m, 1e-12), |c| PhotonStatistics::thermal(m, c))
            }
            "squeezed-vacuum" => {
                let m = self.mean()?;
                self.truncated(2 * thermal_cutoff(m.max(1e-3), 1e-13) + 64, |c| PhotonStatistics::squeezed_vacuum(m, c))
            }
            _ => Ok(statistics(&self.build()?)),
        }
    }

    /// Statistics on `default` levels, or on the explicit cutoff if its tail is negligible.
    fn truncated(
        &self,
        default: usize,
        make: impl Fn(usize) -> PhotonStatistics<f64>,
    ) -> Result<PhotonStatistics<f64>> {
        let Some(cutoff) = self.cutoff else { return Ok(make(default)) };
        let stats = make(cutoff);
        let tail = 1.0 - stats.total();
        if tail >= TAIL_TOL {
            return Err(Error::CutoffTooSmall { cutoff, tail, tol: TAIL_TOL, required: default.max(cutoff + 1) });
        }
        Ok(stats)
    }

    pub fn closed_form(&self) -> Result<ClosedForm<f64>> {
        Ok(match self.family.as_str() {
            "vacuum" => ClosedForm::Fock { n: 0 },
            "fock" => ClosedForm::Fock { n: self.n.unwrap_or(0) },
            "coherent" => ClosedForm::Coherent { mean_n: self.mean()? },
            "thermal" => ClosedForm::Thermal { mean_n: self.mean()? },
            "squeezed-vacuum" => ClosedForm::SqueezedVacuum { mean_n: self.mean()? },
            other => return Err(Error::invalid(format!("no closed form for state '{other}'"))),
        })
    }

    /// Copy with the mean photon number replaced (for intensity sweeps).
    pub fn at_mean(&self, mean_n: f64) -> Result<Self> {
        let mut s = self.clone();
        match s.family.as_str() {
            "coherent" | "cat-even" | "cat-odd" | "mixed" => {
                s.alpha = Some(mean_n.max(0.0).sqrt());
            }
            "thermal" => s.mean_n = Some(mean_n),
            "squeezed-vacuum" => {
                s.r = None;
                s.mean_n = Some(mean_n);
            }
            other => return Err(Error::invalid(format!("state '{other}' cannot be swept in mean photon number"))),
        }
        s.cutoff = None;
        Ok(s)
    }
}
