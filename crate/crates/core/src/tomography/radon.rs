use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;

use super::quadrature::QuadratureDistribution;
use crate::fockspace::{PhaseAxes, WignerGrid};
use crate::io::fmt_f64;
use crate::{Error, Result};

const MIN_ANGLES: usize = 20;

fn uniform_step(x: &[f64]) -> Option<f64> {
    let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let ok = h > 0.0 && x.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    ok.then_some(h)
}

/// Ramp-filtered projection (spatial-domain ramp kernel, Hann apodized at the
/// grid Nyquist) on a zero-padded grid starting at `start`.
fn filtered(pr: &[f64], dx: f64, planner: &mut FftPlanner<f64>) -> (Vec<f64>, usize) {
    let n = pr.len();
    let len = (4 * n).next_power_of_two();
    let offset = (len - n) / 2;
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    let mut h: Vec<Complex64> = (0..len)
        .map(|i| {
            let j = if i <= len / 2 { i as i64 } else { i as i64 - len as i64 };
            let v = if j == 0 {
                1.0 / (4.0 * dx * dx)
            } else if j % 2 != 0 {
                -1.0 / ((j * j) as f64 * PI * PI * dx * dx)
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    fft.process(&mut h);

    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, v) in pr.iter().enumerate() {
        buf[offset + i] = Complex64::new(*v, 0.0);
    }
    fft.process(&mut buf);
    for (i, (b, hv)) in buf.iter_mut().zip(&h).enumerate() {
        let f = if i <= len / 2 { i as f64 } else { (len - i) as f64 } / len as f64;
        let hann = 0.5 * (1.0 + (2.0 * PI * f).cos());
        *b *= hv.re * hann;
    }
    ifft.process(&mut buf);
    let scale = dx / len as f64;
    (buf.iter().map(|c| c.re * scale).collect(), offset)
}

/// Filtered back-projection of quadrature distributions over [0, π) onto the
/// phase-space grid.
pub fn inverse_radon(distributions: &[QuadratureDistribution], axes: &PhaseAxes<f64>) -> Result<WignerGrid<f64>> {
    let count = distributions.len();
    if count < MIN_ANGLES {
        return Err(Error::invalid(format!("inverse Radon needs at least {MIN_ANGLES} angles (got {count})")));
    }
    let grid = &distributions[0].x_grid;
    if grid.len() < 3 {
        return Err(Error::invalid("x grid needs at least 3 points"));
    }
    if distributions.iter().any(|d| d.x_grid != *grid || d.density.len() != grid.len()) {
        return Err(Error::invalid("all distributions must share one x grid"));
    }
    let dx = uniform_step(grid).ok_or_else(|| Error::invalid("x grid must be uniformly spaced"))?;
    let step = PI / count as f64;
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|a, b| distributions[*a].theta.total_cmp(&distributions[*b].theta));
    for (j, &i) in order.iter().enumerate() {
        if (distributions[i].theta - step * j as f64).abs() > 1e-9 {
            return Err(Error::invalid("angles must be uniform over [0, π) starting at 0"));
        }
    }

    let mut planner = FftPlanner::new();
    let filt: Vec<(Vec<f64>, usize)> = distributions.iter().map(|d| filtered(&d.density, dx, &mut planner)).collect();
    let x0 = grid[0];
    let np = axes.p.len();
    let values: Vec<f64> = (0..axes.x.len() * np)
        .into_par_iter()
        .map(|idx| {
            let (x, p) = (axes.x[idx / np], axes.p[idx % np]);
            let mut acc = 0.0;
            for (d, (q, offset)) in distributions.iter().zip(&filt) {
                let t = x * d.theta.cos() + p * d.theta.sin();
                let u = (t - x0) / dx + *offset as f64;
                if u < 0.0 || u >= (q.len() - 1) as f64 {
                    continue;
                }
                let i = u.floor() as usize;
                let f = u - i as f64;
                acc += q[i] * (1.0 - f) + q[i + 1] * f;
            }
            acc * step
        })
        .collect();
    Ok(WignerGrid { x_axis: axes.x.clone(), p_axis: axes.p.clone(), values })
}

/// CSV `x,p,w`, x-major.
pub fn wigner_csv(grid: &WignerGrid<f64>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "p", "w"])?;
    for (i, x) in grid.x_axis.iter().enumerate() {
        for (j, p) in grid.p_axis.iter().enumerate() {
            w.write_record([fmt_f64(*x), fmt_f64(*p), fmt_f64(grid.get(i, j))])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Serialize)]
struct WignerMeta {
    nx: usize,
    np: usize,
    x_range: [f64; 2],
    p_range: [f64; 2],
    integral: f64,
    max: f64,
    min: f64,
    angles: usize,
}

/// JSON sidecar for a reconstructed grid.
pub fn wigner_metadata(grid: &WignerGrid<f64>, angles: usize) -> Result<String> {
    let ends = |a: &[f64]| [a[0], a[a.len() - 1]];
    let meta = WignerMeta {
        nx: grid.x_axis.len(),
        np: grid.p_axis.len(),
        x_range: ends(&grid.x_axis),
        p_range: ends(&grid.p_axis),
        integral: grid.integral(),
        max: grid.max_value(),
        min: grid.values.iter().cloned().fold(f64::INFINITY, f64::min),
        angles,
    };
    Ok(serde_json::to_string_pretty(&meta)?)
}
