use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::system_model::ScalarFlux;
use crate::wave_lab::GridFunction;

/// Courant number of the Godunov scheme.
pub const GODUNOV_CFL: f64 = 0.9;

/// Exact Riemann flux: `min f` on `[a, b]` if `a ≤ b`, `max f` on `[b, a]` otherwise.
pub fn godunov_flux(flux: &dyn ScalarFlux, a: f64, b: f64, critical: &[f64]) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let pick = |acc: f64, v: f64| if a <= b { acc.min(v) } else { acc.max(v) };
    let mut out = pick(flux.f(a), flux.f(b));
    for &c in critical {
        if c > lo && c < hi {
            out = pick(out, flux.f(c));
        }
    }
    out
}

fn max_speed(flux: &dyn ScalarFlux, lo: f64, hi: f64) -> f64 {
    let probes = 64;
    (0..=probes)
        .map(|k| lo + (hi - lo) * k as f64 / probes as f64)
        .chain(flux.critical_points().into_iter().filter(|&c| c > lo && c < hi))
        .map(|u| flux.df(u).abs())
        .fold(0.0, f64::max)
}

/// First-order Godunov solution at each of the increasing `times`.
///
/// Node values act as cell averages; the end cells see transmissive ghost cells.
pub fn godunov_snapshots(flux: &dyn ScalarFlux, u0: &GridFunction, times: &[f64]) -> Result<Vec<GridFunction>> {
    if u0.dim() != 1 {
        return Err(Error::ShapeMismatch(format!("scalar solver given {} components", u0.dim())));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::ParameterViolation("snapshot times must be nonnegative and increasing".into()));
    }
    let crit = flux.critical_points();
    let data = u0.data();
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let speed = max_speed(flux, lo, hi).max(1e-12);
    let dx = u0.dx();
    let dt_max = GODUNOV_CFL * dx / speed;
    let nodes = u0.nodes();

    let mut u = u0.clone();
    let mut fluxes = vec![0.0; nodes + 1];
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            if speed * dt / dx > 1.0 {
                return Err(Error::CflViolation(format!("Courant number {}", speed * dt / dx)));
            }
            let r = dt / dx;
            for _ in 0..steps {
                let v = u.data();
                fluxes[1..nodes].par_iter_mut().enumerate().for_each(|(j, f)| {
                    *f = godunov_flux(flux, v[j], v[j + 1], &crit);
                });
                fluxes[0] = flux.f(v[0]);
                fluxes[nodes] = flux.f(v[nodes - 1]);
                u.data_mut().par_iter_mut().enumerate().for_each(|(j, s)| {
                    *s -= r * (fluxes[j + 1] - fluxes[j]);
                });
            }
            now = target;
        }
        out.push(u.clone());
    }
    Ok(out)
}

/// Godunov solution at time `t` after resampling `u0` onto `cells` cells.
pub fn godunov_scalar(flux: &dyn ScalarFlux, u0: &GridFunction, t: f64, cells: usize) -> Result<GridFunction> {
    let start = if cells == u0.cells() { u0.clone() } else { u0.resample(u0.x_min(), u0.x_max(), cells)? };
    Ok(godunov_snapshots(flux, &start, &[t])?.remove(0))
}
