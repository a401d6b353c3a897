use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::forward_bounds;
use super::grid::{l1_distance, GridFunction};
use super::lab::Lab;
use super::profile::SupportLayout;
use crate::error::{Error, Result};
use crate::system_model::FluxModel;

/// One snapshot of the monitored quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSample {
    pub t: f64,
    /// 1 while waves are separated, 2 during interaction.
    pub phase: u8,
    /// `Σ_k sup|l_k(u)·u|`.
    pub p: f64,
    /// `Σ_k sup|l_k(u)·u_x|`.
    pub q: f64,
    pub sup_u: f64,
    pub sup_ux: f64,
    pub integrals: Vec<f64>,
    pub support: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionDiagnostics {
    pub samples: Vec<DiagnosticSample>,
    /// Start of the interaction phase (`T` when the waves never meet).
    pub interaction_start: f64,
    /// `sup|φ|` and `sup|φ′|` of the initial datum.
    pub measured_d: f64,
    pub measured_b: f64,
    /// `L¹` gap between the interaction stage at full and half resolution.
    pub richardson_l1: Option<f64>,
}

impl EvolutionDiagnostics {
    pub fn p0(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.p)
    }
    pub fn q0(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.q)
    }
    pub fn max_p(&self) -> f64 {
        self.samples.iter().map(|s| s.p).fold(0.0, f64::max)
    }
    pub fn max_q(&self) -> f64 {
        self.samples.iter().map(|s| s.q).fold(0.0, f64::max)
    }

    /// Largest drift of `∫u_k` from its initial value, summed over components.
    pub fn integral_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else { return 0.0 };
        self.samples
            .iter()
            .map(|s| s.integrals.iter().zip(&first.integrals).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e: std::io::Error| Error::io(path, e);
        let mut f = File::create(path).map_err(io)?;
        let dim = self.samples.first().map_or(0, |s| s.integrals.len());
        let mut header = String::from("t,phase,P,Q,sup_u,sup_ux");
        for k in 0..dim {
            header.push_str(&format!(",int_u{}", k + 1));
        }
        header.push_str(",supp_lo,supp_hi");
        writeln!(f, "{header}").map_err(io)?;
        for s in &self.samples {
            let mut line = format!("{},{},{},{},{},{}", s.t, s.phase, s.p, s.q, s.sup_u, s.sup_ux);
            for v in &s.integrals {
                line.push_str(&format!(",{v}"));
            }
            match s.support {
                Some((a, b)) => line.push_str(&format!(",{a},{b}")),
                None => line.push_str(",,"),
            }
            writeln!(f, "{line}").map_err(io)?;
        }
        Ok(())
    }
}

/// Characteristic data of one family: foot points, states and speeds.
struct Wave {
    family: usize,
    y: Vec<f64>,
    states: Vec<Vec<f64>>,
    speeds: Vec<f64>,
}

impl Wave {
    fn position(&self, j: usize, t: f64) -> f64 {
        self.y[j] + self.speeds[j] * t
    }

    fn span(&self, t: f64) -> (f64, f64) {
        (self.position(0, t), self.position(self.y.len() - 1, t))
    }

    fn check_monotone(&self, t: f64, horizon: f64) -> Result<()> {
        for j in 0..self.y.len() - 1 {
            if self.position(j + 1, t) < self.position(j, t) {
                return Err(Error::HorizonExceeded { t, horizon });
            }
        }
        Ok(())
    }

    /// Adds the wave value at `(t, x)` to `out`; bisection in the foot point.
    fn add_value(&self, lab: &Lab, t: f64, x: f64, tol: f64, out: &mut [f64], tmp: &mut [f64]) {
        let (lo, hi) = self.span(t);
        if !(x > lo && x < hi) {
            return;
        }
        let last = self.y.len() - 1;
        let (mut a, mut b) = (0usize, last);
        while b - a > 1 {
            let mid = (a + b) / 2;
            if self.position(mid, t) <= x {
                a = mid;
            } else {
                b = mid;
            }
        }
        let (ya, yb) = (self.y[a], self.y[b]);
        let (sa, sb) = (&self.states[a], &self.states[b]);
        let lerp = |s: f64, tmp: &mut [f64]| {
            for c in 0..tmp.len() {
                tmp[c] = (1.0 - s) * sa[c] + s * sb[c];
            }
        };
        let (mut s0, mut s1) = (0.0f64, 1.0f64);
        while (s1 - s0) * (yb - ya) > tol {
            let mid = 0.5 * (s0 + s1);
            lerp(mid, tmp);
            let pos = ya + mid * (yb - ya) + lab.speed(tmp, self.family) * t;
            if pos < x {
                s0 = mid;
            } else {
                s1 = mid;
            }
        }
        lerp(0.5 * (s0 + s1), tmp);
        for (o, v) in out.iter_mut().zip(tmp.iter()) {
            *o += v;
        }
    }
}

#[derive(Default)]
struct PqAccumulator {
    p: Vec<f64>,
    q: Vec<f64>,
    sup_u: f64,
    sup_ux: f64,
    /// Riemann-coordinate models measure `sup_i |w_i|` instead of the Euclidean norm.
    componentwise: bool,
}

impl PqAccumulator {
    fn new(model: &dyn FluxModel) -> Self {
        let dim = model.dim();
        PqAccumulator {
            p: vec![0.0; dim],
            q: vec![0.0; dim],
            componentwise: model.chart().is_some(),
            ..Default::default()
        }
    }

    fn norm(&self, v: &[f64]) -> f64 {
        if self.componentwise {
            v.iter().map(|x| x.abs()).fold(0.0, f64::max)
        } else {
            v.iter().map(|x| x * x).sum::<f64>().sqrt()
        }
    }

    fn node(&mut self, model: &dyn FluxModel, u: &[f64]) {
        let norm = self.norm(u);
        if norm == 0.0 {
            return;
        }
        self.sup_u = self.sup_u.max(norm);
        let l = model.left_eigenvectors(u);
        for k in 0..u.len() {
            let v: f64 = (0..u.len()).map(|c| l[(k, c)] * u[c]).sum();
            self.p[k] = self.p[k].max(v.abs());
        }
    }

    fn segment(&mut self, model: &dyn FluxModel, ua: &[f64], ub: &[f64], width: f64) {
        if width <= 0.0 || ua.iter().zip(ub).all(|(a, b)| a == b) {
            return;
        }
        let mid: Vec<f64> = ua.iter().zip(ub).map(|(a, b)| 0.5 * (a + b)).collect();
        let slope: Vec<f64> = ua.iter().zip(ub).map(|(a, b)| (b - a) / width).collect();
        self.sup_ux = self.sup_ux.max(self.norm(&slope));
        let l = model.left_eigenvectors(&mid);
        for k in 0..mid.len() {
            let v: f64 = (0..mid.len()).map(|c| l[(k, c)] * slope[c]).sum();
            self.q[k] = self.q[k].max(v.abs());
        }
    }

    fn merge(mut self, other: PqAccumulator) -> PqAccumulator {
        for (a, b) in self.p.iter_mut().zip(other.p) {
            *a = a.max(b);
        }
        for (a, b) in self.q.iter_mut().zip(other.q) {
            *a = a.max(b);
        }
        self.sup_u = self.sup_u.max(other.sup_u);
        self.sup_ux = self.sup_ux.max(other.sup_ux);
        self
    }
}

/// `P`, `Q` and the other monitored quantities of a grid function.
pub fn grid_sample(model: &dyn FluxModel, g: &GridFunction, t: f64, phase: u8, threshold: f64) -> DiagnosticSample {
    let dim = g.dim();
    let acc = (0..g.nodes() - 1)
        .into_par_iter()
        .fold(
            || PqAccumulator::new(model),
            |mut acc, j| {
                acc.node(model, g.state(j));
                acc.segment(model, g.state(j), g.state(j + 1), g.dx());
                acc
            },
        )
        .reduce(|| PqAccumulator::new(model), PqAccumulator::merge);
    let mut acc = acc;
    acc.node(model, g.state(g.nodes() - 1));
    DiagnosticSample {
        t,
        phase,
        p: acc.p.iter().sum(),
        q: acc.q.iter().sum(),
        sup_u: acc.sup_u,
        sup_ux: acc.sup_ux,
        integrals: (0..dim).map(|k| g.integral(k)).collect(),
        support: g.support(threshold),
    }
}

fn wave_sample(model: &dyn FluxModel, waves: &[Wave], t: f64, threshold: f64) -> DiagnosticSample {
    let dim = model.dim();
    let mut acc = PqAccumulator::new(model);
    let mut integrals = vec![0.0; dim];
    let mut support: Option<(f64, f64)> = None;
    for w in waves {
        for j in 0..w.y.len() {
            acc.node(model, &w.states[j]);
            let norm = w.states[j].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > threshold {
                let x = w.position(j, t);
                support = Some(support.map_or((x, x), |(a, b)| (a.min(x), b.max(x))));
            }
            if j + 1 < w.y.len() {
                let width = w.position(j + 1, t) - w.position(j, t);
                acc.segment(model, &w.states[j], &w.states[j + 1], width);
                for k in 0..dim {
                    integrals[k] += 0.5 * width * (w.states[j][k] + w.states[j + 1][k]);
                }
            }
        }
    }
    DiagnosticSample {
        t,
        phase: 1,
        p: acc.p.iter().sum(),
        q: acc.q.iter().sum(),
        sup_u: acc.sup_u,
        sup_ux: acc.sup_ux,
        integrals,
        support,
    }
}

/// Splits `φ` into per-family characteristic data using the layout intervals.
fn split_waves(lab: &Lab, phi: &GridFunction, layout: &SupportLayout) -> Result<Vec<Wave>> {
    let n = lab.dim();
    let slack = 1e-12 * (1.0 + layout.l);
    for j in 0..phi.nodes() {
        let x = phi.x(j);
        let inside = (0..n).any(|i| x >= layout.xi_minus[i] - slack && x <= layout.xi_plus[i] + slack);
        if !inside && phi.state(j).iter().any(|v| v.abs() > 1e-14) {
            return Err(Error::ParameterViolation(format!("phi is nonzero at x = {x}, outside every family support")));
        }
    }
    (0..n)
        .map(|i| {
            let (a, b) = (layout.xi_minus[i], layout.xi_plus[i]);
            let mut y = vec![a];
            y.extend((0..phi.nodes()).map(|j| phi.x(j)).filter(|&x| x > a + slack && x < b - slack));
            y.push(b);
            let states: Vec<Vec<f64>> = y.iter().map(|&x| phi.eval(x)).collect();
            let speeds = states.iter().map(|s| lab.speed(s, i)).collect();
            Ok(Wave { family: i, y, states, speeds })
        })
        .collect()
}

fn eval_waves(lab: &Lab, waves: &[Wave], t: f64, x_min: f64, x_max: f64, cells: usize) -> Result<GridFunction> {
    let dim = lab.dim();
    let tol = lab.options.bisection_tol * waves.iter().map(|w| w.y[w.y.len() - 1] - w.y[0]).fold(0.0, f64::max);
    let mut g = GridFunction::zeros(x_min, x_max, cells, dim)?;
    let (x0, dx) = (g.x_min(), g.dx());
    g.data_mut().par_chunks_mut(dim).enumerate().for_each(|(j, out)| {
        let x = x0 + j as f64 * dx;
        let mut tmp = vec![0.0; dim];
        for w in waves {
            w.add_value(lab, t, x, tol, out, &mut tmp);
        }
    });
    Ok(g)
}

/// Richtmyer two-step Lax–Wendroff with the end nodes held fixed.
fn lax_wendroff(model: &dyn FluxModel, u0: GridFunction, duration: f64, cfl: f64, speed: f64, samples: usize,
    mut observe: impl FnMut(f64, &GridFunction) -> Result<()>) -> Result<GridFunction> {
    if duration <= 0.0 {
        return Ok(u0);
    }
    let dim = u0.dim();
    let nodes = u0.nodes();
    let dx = u0.dx();
    let dt_max = cfl * dx / speed.max(1e-12);
    let steps = (duration / dt_max).ceil().max(1.0) as usize;
    let dt = duration / steps as f64;
    if speed * dt / dx > 1.0 {
        return Err(Error::CflViolation(format!("Courant number {}", speed * dt / dx)));
    }
    let every = (steps / samples.max(1)).max(1);
    let r = dt / dx;
    let mut u = u0;
    let mut fu = vec![0.0; nodes * dim];
    let mut half = vec![0.0; (nodes - 1) * dim];
    let mut fhalf = vec![0.0; (nodes - 1) * dim];
    for step in 1..=steps {
        {
            let data = u.data();
            fu.par_chunks_mut(dim).zip(data.par_chunks(dim)).try_for_each(|(f, s)| model.flux(s, f))?;
            half.par_chunks_mut(dim).enumerate().for_each(|(j, h)| {
                for c in 0..dim {
                    h[c] = 0.5 * (data[j * dim + c] + data[(j + 1) * dim + c])
                        - 0.5 * r * (fu[(j + 1) * dim + c] - fu[j * dim + c]);
                }
            });
            fhalf.par_chunks_mut(dim).zip(half.par_chunks(dim)).try_for_each(|(f, s)| model.flux(s, f))?;
        }
        let data = u.data_mut();
        data[dim..(nodes - 1) * dim].par_chunks_mut(dim).enumerate().for_each(|(j0, s)| {
            let j = j0 + 1;
            for c in 0..dim {
                s[c] -= r * (fhalf[j * dim + c] - fhalf[(j - 1) * dim + c]);
            }
        });
        if step % every == 0 || step == steps {
            observe(step as f64 * dt, &u)?;
        }
    }
    Ok(u)
}

fn check_forward_preconditions(lab: &Lab, phi: &GridFunction, layout: &SupportLayout, d: f64, b: f64) -> Result<()> {
    let c = lab.constants();
    let t = layout.t;
    let l = layout.l;
    if c.dim > 1 && t * c.delta_lambda_min < l * (1.0 - 1e-12) {
        return Err(Error::ParameterViolation(format!("T = {t} is shorter than L/Δ = {}", l / c.delta_lambda_min)));
    }
    if !layout.disjoint() {
        return Err(Error::ParameterViolation("family supports overlap at t = 0".into()));
    }
    let fb = forward_bounds(c, l, t);
    let tol = 1.0 + 1e-9;
    if d > fb.d_max * tol {
        return Err(Error::ParameterViolation(format!("amplitude {d} exceeds {} ({})", fb.d_max, fb.d_binder)));
    }
    if b > fb.b_max * tol {
        return Err(Error::ParameterViolation(format!("slope {b} exceeds {} ({})", fb.b_max, fb.b_binder)));
    }
    if phi.dim() != lab.dim() {
        return Err(Error::ShapeMismatch(format!("phi has {} components for N = {}", phi.dim(), lab.dim())));
    }
    Ok(())
}

impl Lab {
    /// Lax–Wendroff solution of `u_t + f(u)_x = 0` from arbitrary grid data up to time `t`.
    ///
    /// The grid is the support of `u0` padded by `speed_max·t` and 5%, with `options.cells`
    /// cells; the Richardson estimate compares against a run on half as many cells.
    pub fn evolve_grid(&self, u0: &GridFunction, t: f64) -> Result<(GridFunction, EvolutionDiagnostics)> {
        let model = self.model();
        let c = self.constants();
        if u0.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!("data has {} components for N = {}", u0.dim(), self.dim())));
        }
        let thr = self.options.support_threshold;
        let (a, b) = u0.support(thr).unwrap_or((u0.x_min(), u0.x_max()));
        let pad = 0.05 * (b - a) + c.speed_max * t + 4.0 * u0.dx();
        let (lo, hi) = (a - pad, b + pad);
        let cells = self.options.cells + self.options.cells % 2;
        let start = u0.resample(lo, hi, cells)?;
        let mut samples = vec![grid_sample(model, &start, 0.0, 2, thr)];
        let k1 = self.options.diag_samples.max(1);
        let fine = lax_wendroff(model, start, t, self.options.cfl, c.speed_max, k1, |s, g| {
            samples.push(grid_sample(model, g, s, 2, thr));
            Ok(())
        })?;
        let richardson = if self.options.richardson && t > 0.0 {
            let coarse = lax_wendroff(model, u0.resample(lo, hi, cells / 2)?, t, self.options.cfl, c.speed_max, 1, |_, _| Ok(()))?;
            Some(l1_distance(&fine.coarsened()?, &coarse)?)
        } else {
            None
        };
        let diagnostics = EvolutionDiagnostics {
            samples,
            interaction_start: 0.0,
            measured_d: u0.sup_norm(),
            measured_b: u0.slope_sup(),
            richardson_l1: richardson,
        };
        Ok((fine, diagnostics))
    }

    /// Solves `u_t + f(u)_x = 0`, `u(0) = φ` up to `T = layout.t`.
    ///
    /// While the family supports stay apart each wave is transported exactly along its
    /// characteristics; from `T − L/Δ` on, Lax–Wendroff takes over on a grid covering the
    /// waves and `[−L(1+α₅), L(1+α₅)]`. Returns `u(T)` on that grid.
    pub fn evolve_superposition(&self, phi: &GridFunction, layout: &SupportLayout) -> Result<(GridFunction, EvolutionDiagnostics)> {
        if self.model().chart().is_some() {
            return crate::temple_dynamics::diagonal_evolve(self, phi, layout.t);
        }
        let model = self.model();
        let c = self.constants();
        let t_end = layout.t;
        let d = phi.sup_norm();
        let b = phi.slope_sup();
        check_forward_preconditions(self, phi, layout, d, b)?;
        let thr = self.options.support_threshold;
        let waves = split_waves(self, phi, layout)?;
        let horizon = self.horizon(b);
        let t1 = if c.dim > 1 { (t_end - layout.l / c.delta_lambda_min).max(0.0) } else { t_end };

        let mut samples = Vec::new();
        let k1 = self.options.diag_samples.max(1);
        for s in 0..=k1 {
            let t = t1 * s as f64 / k1 as f64;
            for w in &waves {
                w.check_monotone(t, horizon)?;
            }
            samples.push(wave_sample(model, &waves, t, thr));
            if s == 0 && t1 == 0.0 {
                break;
            }
        }
        let q0 = samples[0].q;
        let blowup = |sample: &DiagnosticSample| -> Result<()> {
            if q0 > 0.0 && sample.q > 4.0 * q0 {
                Err(Error::BlowupDetected { t: sample.t, q: sample.q, limit: 4.0 * q0 })
            } else {
                Ok(())
            }
        };
        for s in &samples {
            blowup(s)?;
        }

        let reach = layout.l * (1.0 + c.alpha5);
        let (mut lo, mut hi) = (-reach, reach);
        for w in &waves {
            let (a, b2) = w.span(t1);
            lo = lo.min(a);
            hi = hi.max(b2);
        }
        let travel = c.speed_max * (t_end - t1);
        let pad = 0.05 * (hi - lo) + travel;
        let (lo, hi) = (lo - pad, hi + pad);
        let cells = self.options.cells + self.options.cells % 2;
        let start = eval_waves(self, &waves, t1, lo, hi, cells)?;
        let duration = t_end - t1;
        let mut richardson = None;
        let result = if duration > 0.0 {
            let fine = lax_wendroff(model, start, duration, self.options.cfl, c.speed_max, k1, |t, g| {
                let sample = grid_sample(model, g, t1 + t, 2, thr);
                blowup(&sample)?;
                samples.push(sample);
                Ok(())
            })?;
            if self.options.richardson {
                let coarse_start = eval_waves(self, &waves, t1, lo, hi, cells / 2)?;
                let coarse = lax_wendroff(model, coarse_start, duration, self.options.cfl, c.speed_max, 1, |_, _| Ok(()))?;
                richardson = Some(l1_distance(&fine.coarsened()?, &coarse)?);
            }
            fine
        } else {
            start
        };
        let diagnostics = EvolutionDiagnostics {
            samples,
            interaction_start: t1,
            measured_d: d,
            measured_b: b,
            richardson_l1: richardson,
        };
        Ok((result, diagnostics))
    }
}
