use num_complex::Complex;
use rayon::prelude::*;

use super::state::{Density, PhotonicState};
use crate::special::{displacement_column, hermite_functions};
use crate::Real;

/// (⟨X_θ⟩, ⟨X_θ²⟩) for X_θ = (a e^{−iθ} + a† e^{iθ})/2.
pub fn quadrature_moments<T: Real>(state: &PhotonicState<T>, theta: T) -> (T, T) {
    let rot = Complex::from_polar(T::one(), -theta);
    let mean = (state.expect_a() * rot).re;
    let half = T::lit(0.5);
    let second = half * (state.expect_a2() * rot * rot).re + half * state.mean_photon_number() + T::lit(0.25);
    (mean, second)
}

pub fn quadrature_variance<T: Real>(state: &PhotonicState<T>, theta: T) -> T {
    let (m, s) = quadrature_moments(state, theta);
    s - m * m
}

/// pr(x|θ) = Σ_{mn} ρ_{mn} e^{−i(m−n)θ} ψ_m(x) ψ_n(x) on the given points.
pub fn quadrature_distribution<T: Real>(state: &PhotonicState<T>, theta: T, xs: &[T]) -> Vec<T> {
    let dim = state.cutoff();
    xs.par_iter()
        .map(|&x| {
            let psi = hermite_functions(x, dim);
            match state.density() {
                Density::Diagonal(p) => p.iter().zip(&psi).map(|(p, f)| *p * *f * *f).sum(),
                Density::Dense(rho) => {
                    // v_m = ψ_m e^{imθ}; pr = Re Σ conj(v_m) ρ_{mn} v_n
                    let v: Vec<Complex<T>> =
                        psi.iter().enumerate().map(|(m, f)| Complex::from_polar(*f, T::of(m) * theta)).collect();
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for m in 0..dim {
                        if psi[m] == T::zero() {
                            continue;
                        }
                        let row = rho.row(m);
                        let mut inner = Complex::new(T::zero(), T::zero());
                        for n in 0..dim {
                            inner += row[n] * v[n];
                        }
                        acc += v[m].conj() * inner;
                    }
                    acc.re
                }
            }
        })
        .collect()
}

/// Uniform phase-space axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAxes<T> {
    pub x: Vec<T>,
    pub p: Vec<T>,
}

impl<T: Real> PhaseAxes<T> {
    pub fn uniform(x_min: T, x_max: T, nx: usize, p_min: T, p_max: T, np: usize) -> Self {
        let axis =
            |a: T, b: T, n: usize| -> Vec<T> { (0..n).map(|i| a + (b - a) * T::of(i) / T::of(n.max(2) - 1)).collect() };
        PhaseAxes { x: axis(x_min, x_max, nx), p: axis(p_min, p_max, np) }
    }

    pub fn square(half_width: T, points: usize) -> Self {
        Self::uniform(-half_width, half_width, points, -half_width, half_width, points)
    }
}

/// Default grid: 201 × 201 points over |x|, |p| ≤ √⟨n⟩ + 4.
pub fn default_grid<T: Real>(state: &PhotonicState<T>) -> PhaseAxes<T> {
    PhaseAxes::square(state.mean_photon_number().sqrt() + T::lit(4.0), 201)
}

/// W(x, p) sampled on a grid; `values[i * p.len() + j]` is W(x_i, p_j).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid<T> {
    pub x_axis: Vec<T>,
    pub p_axis: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> WignerGrid<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.p_axis.len() + j]
    }

    fn step(axis: &[T]) -> T {
        if axis.len() < 2 {
            T::one()
        } else {
            (axis[axis.len() - 1] - axis[0]) / T::of(axis.len() - 1)
        }
    }

    /// Riemann sum ∬ W dx dp.
    pub fn integral(&self) -> T {
        let s: T = self.values.iter().cloned().sum();
        s * Self::step(&self.x_axis) * Self::step(&self.p_axis)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().cloned().fold(T::neg_infinity(), T::max)
    }

    pub fn max_abs_diff(&self, other: &WignerGrid<T>) -> T {
        self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max)
    }

    /// Marginal over p: ∫ W(x, p) dp.
    pub fn x_marginal(&self) -> Vec<T> {
        let dp = Self::step(&self.p_axis);
        let np = self.p_axis.len();
        (0..self.x_axis.len()).map(|i| self.values[i * np..(i + 1) * np].iter().cloned().sum::<T>() * dp).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridWarning {
    /// The grid misses part of the state's phase-space support.
    TooSmall { needed_half_width: f64 },
    /// Grid spacing too coarse to resolve the vacuum-sized features.
    TooCoarse { spacing: f64, max_spacing: f64 },
}

#[derive(Debug, Clone)]
pub struct WignerOutcome<T> {
    pub grid: WignerGrid<T>,
    pub warnings: Vec<GridWarning>,
}

const MAX_SPACING: f64 = 0.2;
const EDGE_FRACTION: f64 = 1e-4;

fn check_grid<T: Real>(grid: &WignerGrid<T>) -> Vec<GridWarning> {
    let mut warnings = Vec::new();
    let (nx, np) = (grid.x_axis.len(), grid.p_axis.len());
    let peak = grid.values.iter().fold(T::zero(), |m, v| m.max(v.abs())).f64();
    let mut edge = 0.0f64;
    for i in 0..nx {
        for j in 0..np {
            if i == 0 || j == 0 || i + 1 == nx || j + 1 == np {
                edge = edge.max(grid.get(i, j).abs().f64());
            }
        }
    }
    if edge > EDGE_FRACTION * peak {
        let half = |a: &[T]| a.iter().fold(0.0f64, |m, v| m.max(v.f64().abs()));
        let needed = 1.5 * half(&grid.x_axis).max(half(&grid.p_axis)) + 1.0;
        warnings.push(GridWarning::TooSmall { needed_half_width: needed });
    }
    for axis in [&grid.x_axis, &grid.p_axis] {
        let h = WignerGrid::step(axis).f64();
        if h > MAX_SPACING {
            warnings.push(GridWarning::TooCoarse { spacing: h, max_spacing: MAX_SPACING });
        }
    }
    warnings
}

/// W(α) = (2/π) Σ_{mn} ρ_{nm} (−1)^n ⟨m|D(2α)|n⟩ with α = x + ip.
pub fn wigner<T: Real>(state: &PhotonicState<T>, axes: &PhaseAxes<T>) -> WignerOutcome<T> {
    let dim = state.cutoff();
    let two_over_pi = T::lit(2.0) / T::PI();
    let points: Vec<(T, T)> = axes.x.iter().flat_map(|&x| axes.p.iter().map(move |&p| (x, p))).collect();
    let values = points
        .par_iter()
        .map(|&(x, p)| {
            let xi = Complex::new(T::lit(2.0) * x, T::lit(2.0) * p);
            let r2 = xi.norm_sqr();
            let w = match state.density() {
                Density::Diagonal(probs) => {
                    let f = displacement_column(r2, 0, dim);
                    probs
                        .iter()
                        .zip(&f)
                        .enumerate()
                        .map(|(n, (pn, fn_))| if n % 2 == 0 { *pn * *fn_ } else { -*pn * *fn_ })
                        .sum()
                }
                Density::Dense(rho) => {
                    let r = r2.sqrt();
                    let unit = if r > T::zero() { xi / r } else { Complex::new(T::one(), T::zero()) };
                    let mut acc = Complex::new(T::zero(), T::zero());
                    let mut up = Complex::new(T::one(), T::zero());
                    let down_step = -unit.conj();
                    let mut down = Complex::new(T::one(), T::zero());
                    for a in 0..dim {
                        let f = displacement_column(r2, a, dim - a);
                        for (j, fj) in f.iter().enumerate() {
                            if *fj == T::zero() {
                                continue;
                            }
                            // m = j + a ≥ n = j: ⟨m|D|n⟩ = unit^a f, term ρ_{nm}(−1)^n
                            let (m, n) = (j + a, j);
                            let s = if n % 2 == 0 { T::one() } else { -T::one() };
                            acc += rho.get(n, m) * up * (*fj * s);
                            if a > 0 {
                                // m = j < n = j + a: ⟨m|D|n⟩ = (−unit*)^a f, term ρ_{nm}(−1)^n
                                let (m, n) = (j, j + a);
                                let s = if n % 2 == 0 { T::one() } else { -T::one() };
                                acc += rho.get(n, m) * down * (*fj * s);
                            }
                        }
                        up *= unit;
                        down *= down_step;
                    }
                    acc.re
                }
            };
            w * two_over_pi
        })
        .collect();
    let grid = WignerGrid { x_axis: axes.x.clone(), p_axis: axes.p.clone(), values };
    let warnings = check_grid(&grid);
    WignerOutcome { grid, warnings }
}

pub fn wigner_default<T: Real>(state: &PhotonicState<T>) -> WignerOutcome<T> {
    wigner(state, &default_grid(state))
}
