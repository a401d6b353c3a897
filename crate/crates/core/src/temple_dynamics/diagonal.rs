use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::system_model::FluxModel;
use crate::wave_lab::{grid_sample, temple_forward_bounds, EvolutionDiagnostics, GridFunction, Lab};

/// Riemann-coordinate data `w` of a model with a chart.
#[derive(Debug, Clone)]
pub struct RiemannState {
    pub w: GridFunction,
}

impl RiemannState {
    /// Checks that every sample lies in the chart box.
    pub fn new(model: &dyn FluxModel, w: GridFunction) -> Result<Self> {
        let chart = model
            .chart()
            .ok_or_else(|| Error::ParameterViolation(format!("model {} has no Riemann chart", model.name())))?;
        if w.dim() != model.dim() {
            return Err(Error::ShapeMismatch(format!("{} components for N = {}", w.dim(), model.dim())));
        }
        for j in 0..w.nodes() {
            if !chart.contains(w.state(j)) {
                return Err(Error::OutOfDomain { state: w.state(j).to_vec() });
            }
        }
        Ok(RiemannState { w })
    }

    /// `u = W⁻¹(w)` node by node.
    pub fn to_conserved(&self, model: &dyn FluxModel) -> Result<GridFunction> {
        let chart = model.chart().ok_or_else(|| Error::ParameterViolation("no Riemann chart".into()))?;
        let mut data = Vec::with_capacity(self.w.data().len());
        for j in 0..self.w.nodes() {
            data.extend((chart.from_riemann)(self.w.state(j)));
        }
        GridFunction::from_data(self.w.x_min(), self.w.dx(), self.w.dim(), data)
    }
}

/// Piecewise-linear interpolation through `(xs[j], vs[j])` with `xs` nondecreasing; zero outside.
fn interp(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if !(x >= xs[0] && x <= xs[n - 1]) {
        return 0.0;
    }
    let k = xs.partition_point(|&p| p <= x).clamp(1, n - 1);
    let (a, b) = (xs[k - 1], xs[k]);
    if b <= a {
        return vs[k];
    }
    let s = (x - a) / (b - a);
    (1.0 - s) * vs[k - 1] + s * vs[k]
}

/// Trajectories `X[i][k][j]` of the `i`-characteristic from node `j` at time level `k`.
struct Trajectories {
    families: usize,
    levels: usize,
    nodes: usize,
    x: Vec<f64>,
}

impl Trajectories {
    fn level(&self, i: usize, k: usize) -> &[f64] {
        let start = (i * (self.levels + 1) + k) * self.nodes;
        &self.x[start..start + self.nodes]
    }

    fn check_monotone(&self, dt: f64) -> Result<()> {
        for i in 0..self.families {
            for k in 0..=self.levels {
                let xs = self.level(i, k);
                if xs.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::HorizonExceeded { t: k as f64 * dt, horizon: (k.max(1) - 1) as f64 * dt });
                }
            }
        }
        Ok(())
    }
}

/// Largest support length among the components of `w`.
fn support_length(w: &GridFunction) -> f64 {
    (0..w.dim())
        .filter_map(|k| w.component_support(k, 0.0))
        .map(|(a, b)| b - a)
        .fold(0.0, f64::max)
}

fn check_classical(lab: &Lab, w0: &GridFunction, t: f64) -> Result<()> {
    let c = lab.constants();
    let chart = lab.model().chart().ok_or_else(|| Error::ParameterViolation("no Riemann chart".into()))?;
    let n = c.dim as f64;
    let d = (0..w0.dim()).map(|k| w0.component_sup(k)).fold(0.0, f64::max);
    let b = (0..w0.dim()).map(|k| w0.component_slope_sup(k)).fold(0.0, f64::max);
    let fb = temple_forward_bounds(c, chart.d_prime, support_length(w0), t);
    let tol = 1.0 + 1e-9;
    if d > fb.d_max * tol {
        return Err(Error::ParameterViolation(format!("amplitude {d} exceeds {} ({})", fb.d_max, fb.d_binder)));
    }
    // Either the separated-wave bound or the direct gradient estimate must hold.
    let direct = if c.alpha1_dblprime > 0.0 { 1.0 / (2.0 * c.alpha1_dblprime * n * t) } else { f64::INFINITY };
    if b > fb.b_max.max(direct) * tol {
        return Err(Error::ParameterViolation(format!("slope {b} exceeds {} ({})", fb.b_max.max(direct), fb.b_binder)));
    }
    Ok(())
}

/// Solves `(w_i)_t + λ_i(w)(w_i)_x = 0` up to time `T` by tracing characteristics.
///
/// Each sweep integrates every family's characteristics (Heun, uniform time levels) with
/// the other families' fields frozen at the previous sweep; sweeps stop once the endpoints
/// move less than the Picard tolerance. The result lives on the input grid, extended by
/// whole cells if the waves leave it.
pub fn diagonal_evolve(lab: &Lab, w0: &GridFunction, t: f64) -> Result<(GridFunction, EvolutionDiagnostics)> {
    let model = lab.model();
    RiemannState::new(model, w0.clone())?;
    check_classical(lab, w0, t)?;
    let n = w0.dim();
    let nodes = w0.nodes();
    let levels = lab.options.picard_time_levels.max(1);
    let dt = t / levels as f64;
    let y: Vec<f64> = (0..nodes).map(|j| w0.x(j)).collect();
    let values: Vec<Vec<f64>> = (0..n).map(|i| w0.component(i)).collect();

    let mut traj = Trajectories { families: n, levels, nodes, x: vec![0.0; n * (levels + 1) * nodes] };
    for i in 0..n {
        for j in 0..nodes {
            let speed = lab.speed(w0.state(j), i);
            for k in 0..=levels {
                traj.x[(i * (levels + 1) + k) * nodes + j] = y[j] + speed * k as f64 * dt;
            }
        }
    }

    let mut sweeps = 0;
    loop {
        traj.check_monotone(dt)?;
        sweeps += 1;
        let old = &traj;
        let mut next = vec![0.0; traj.x.len()];
        next.par_chunks_mut((levels + 1) * nodes).enumerate().for_each(|(i, block)| {
            let columns: Vec<(usize, Vec<f64>)> = (0..nodes)
                .into_par_iter()
                .map(|j| {
                    let mut state = vec![0.0; n];
                    let mut path = Vec::with_capacity(levels + 1);
                    let mut x = y[j];
                    path.push(x);
                    let fill = |k: usize, x: f64, state: &mut [f64]| {
                        for m in 0..n {
                            state[m] = if m == i { values[i][j] } else { interp(old.level(m, k), &values[m], x) };
                        }
                    };
                    for k in 0..levels {
                        fill(k, x, &mut state);
                        let k1 = lab.speed(&state, i);
                        let xp = x + dt * k1;
                        fill(k + 1, xp, &mut state);
                        let k2 = lab.speed(&state, i);
                        x += 0.5 * dt * (k1 + k2);
                        path.push(x);
                    }
                    (j, path)
                })
                .collect();
            for (j, path) in columns {
                for (k, x) in path.into_iter().enumerate() {
                    block[k * nodes + j] = x;
                }
            }
        });
        let residual = (0..n)
            .flat_map(|i| {
                let start = (i * (levels + 1) + levels) * nodes;
                (start..start + nodes).map(|p| (next[p] - traj.x[p]).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        traj.x = next;
        if residual < lab.options.picard_tol {
            break;
        }
        if sweeps >= lab.options.picard_cap {
            return Err(Error::NoConvergence { sweeps, residual });
        }
    }
    traj.check_monotone(dt)?;

    let dx = w0.dx();
    let (mut lo, mut hi) = (w0.x_min(), w0.x_max());
    for i in 0..n {
        let xs = traj.level(i, levels);
        for (j, &x) in xs.iter().enumerate() {
            if values[i][j] != 0.0 {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    let left = ((w0.x_min() - lo) / dx).ceil().max(0.0) as usize;
    let right = ((hi - w0.x_max()) / dx).ceil().max(0.0) as usize;
    let x_min = w0.x_min() - left as f64 * dx;
    let cells = w0.cells() + left + right;
    let x_max = x_min + cells as f64 * dx;
    let snapshot = |k: usize| {
        GridFunction::from_fn(x_min, x_max, cells, n, |x, out| {
            for i in 0..n {
                out[i] = interp(traj.level(i, k), &values[i], x);
            }
        })
    };

    let thr = lab.options.support_threshold;
    let samples_wanted = lab.options.diag_samples.max(1);
    let every = (levels / samples_wanted).max(1);
    let mut samples = Vec::new();
    for k in (0..=levels).step_by(every).chain(std::iter::once(levels)) {
        if samples.last().is_some_and(|s: &crate::wave_lab::DiagnosticSample| s.t == k as f64 * dt) {
            continue;
        }
        let g = snapshot(k)?;
        samples.push(grid_sample(model, &g, k as f64 * dt, 2, thr));
    }
    let result = snapshot(levels)?;
    let diagnostics = EvolutionDiagnostics {
        samples,
        interaction_start: 0.0,
        measured_d: (0..n).map(|k| w0.component_sup(k)).fold(0.0, f64::max),
        measured_b: (0..n).map(|k| w0.component_slope_sup(k)).fold(0.0, f64::max),
        richardson_l1: None,
    };
    Ok((result, diagnostics))
}
