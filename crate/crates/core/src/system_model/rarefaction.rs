use super::models::FluxModel;
use crate::error::{Error, Result};

const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Local error tolerance of the adaptive integrator.
pub const RAREFACTION_TOL: f64 = 1e-10;

/// Eigenvector field `r_i` with its orientation kept continuous along a path.
struct OrientedField<'a> {
    model: &'a dyn FluxModel,
    family: usize,
    reference: Vec<f64>,
}

impl<'a> OrientedField<'a> {
    fn new(model: &'a dyn FluxModel, family: usize) -> Self {
        let zero = vec![0.0; model.dim()];
        let reference = column(model, &zero, family);
        OrientedField { model, family, reference }
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut r = column(self.model, u, self.family);
        let dot: f64 = r.iter().zip(&self.reference).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            r.iter_mut().for_each(|v| *v = -*v);
        }
        r
    }
}

fn column(model: &dyn FluxModel, u: &[f64], i: usize) -> Vec<f64> {
    model.right_eigenvectors(u).column(i).iter().copied().collect()
}

fn check_domain(model: &dyn FluxModel, u: &[f64]) -> Result<()> {
    let ok = match model.chart() {
        Some(chart) => chart.contains(&(chart.to_riemann)(u)) || model.contains(u),
        None => model.contains(u),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfDomain { state: u.to_vec() })
    }
}

/// Dormand–Prince integration of `dR/ds = r_i(R)` from `(s0, y0)` to `s1`.
fn integrate(field: &OrientedField<'_>, s0: f64, y0: &[f64], s1: f64, tol: f64) -> Result<Vec<f64>> {
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut s = s0;
    let span = s1 - s0;
    if span == 0.0 {
        return Ok(y);
    }
    let dir = span.signum();
    let mut h = dir * span.abs().min(1e-2);
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut guard = 0usize;
    while (s1 - s) * dir > 0.0 {
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::NoConvergence { sweeps: guard, residual: (s1 - s).abs() });
        }
        if (s + h - s1) * dir > 0.0 {
            h = s1 - s;
        }
        k[0] = field.eval(&y);
        for stage in 1..7 {
            for c in 0..n {
                tmp[c] = y[c] + h * (0..stage).map(|p| DP_A[stage][p] * k[p][c]).sum::<f64>();
            }
            k[stage] = field.eval(&tmp);
        }
        let mut err = 0.0f64;
        let mut y5 = vec![0.0; n];
        for c in 0..n {
            let inc5: f64 = (0..7).map(|p| DP_B5[p] * k[p][c]).sum();
            let inc4: f64 = (0..7).map(|p| DP_B4[p] * k[p][c]).sum();
            y5[c] = y[c] + h * inc5;
            let scale = tol * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((h * (inc5 - inc4)).abs() / scale);
        }
        if err <= 1.0 {
            s += h;
            y = y5;
            check_domain(field.model, &y)?;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(y)
}

/// `R_i(s)`: the integral curve of `r_i` through the origin at parameter `s`.
pub fn rarefaction_curve(model: &dyn FluxModel, i: usize, s: f64) -> Result<Vec<f64>> {
    if i >= model.dim() {
        return Err(Error::ShapeMismatch(format!("family {i} for N = {}", model.dim())));
    }
    if s.abs() >= model.ball_radius() {
        return Err(Error::OutOfDomain { state: vec![s] });
    }
    let field = OrientedField::new(model, i);
    integrate(&field, 0.0, &vec![0.0; model.dim()], s, RAREFACTION_TOL)
}

/// `R_i` at several parameters; shares integration work between consecutive values.
pub fn rarefaction_curve_batch(model: &dyn FluxModel, i: usize, s: &[f64]) -> Result<Vec<Vec<f64>>> {
    let field = OrientedField::new(model, i);
    let zero = vec![0.0; model.dim()];
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let mut out = vec![Vec::new(); s.len()];
    for sign in [1.0f64, -1.0] {
        let mut pos = 0.0;
        let mut y = zero.clone();
        let idx: Vec<usize> = if sign > 0.0 {
            order.iter().copied().filter(|&k| s[k] >= 0.0).collect()
        } else {
            order.iter().rev().copied().filter(|&k| s[k] < 0.0).collect()
        };
        for k in idx {
            if s[k].abs() >= model.ball_radius() {
                return Err(Error::OutOfDomain { state: vec![s[k]] });
            }
            y = integrate(&field, pos, &y, s[k], RAREFACTION_TOL)?;
            pos = s[k];
            out[k] = y.clone();
        }
    }
    Ok(out)
}

/// Dense table of `R_i` on a uniform parameter grid with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct RarefactionTable {
    pub family: usize,
    pub dim: usize,
    pub s_max: f64,
    ds: f64,
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
    /// Set when `R_i(s) = s·r_i(0)` exactly (constant eigenvector field).
    straight: Option<Vec<f64>>,
}

impl RarefactionTable {
    pub fn build(model: &dyn FluxModel, i: usize, s_max: f64, intervals: usize) -> Result<Self> {
        let dim = model.dim();
        let field = OrientedField::new(model, i);
        let probe = [0.0, 0.5 * s_max, -0.5 * s_max, s_max, -s_max];
        let r0 = field.reference.clone();
        let straight = probe.iter().all(|&p| {
            let u: Vec<f64> = r0.iter().map(|c| c * p).collect();
            let r = field.eval(&u);
            r.iter().zip(&r0).all(|(a, b)| (a - b).abs() == 0.0)
        });
        if straight {
            return Ok(RarefactionTable {
                family: i,
                dim,
                s_max,
                ds: 0.0,
                values: Vec::new(),
                slopes: Vec::new(),
                straight: Some(r0),
            });
        }
        let intervals = intervals.max(2) + intervals % 2;
        let ds = 2.0 * s_max / intervals as f64;
        let params: Vec<f64> = (0..=intervals).map(|k| -s_max + k as f64 * ds).collect();
        let values = rarefaction_curve_batch(model, i, &params)?;
        let slopes = values.iter().map(|v| field.eval(v)).collect();
        Ok(RarefactionTable { family: i, dim, s_max, ds, values, slopes, straight: None })
    }

    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        if let Some(r0) = &self.straight {
            for (o, r) in out.iter_mut().zip(r0) {
                *o = r * s;
            }
            return;
        }
        let x = ((s + self.s_max) / self.ds).clamp(0.0, (self.values.len() - 1) as f64);
        let k = (x.floor() as usize).min(self.values.len() - 2);
        let t = x - k as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        for c in 0..self.dim {
            out[c] = h00 * self.values[k][c]
                + h10 * self.ds * self.slopes[k][c]
                + h01 * self.values[k + 1][c]
                + h11 * self.ds * self.slopes[k + 1][c];
        }
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(s, &mut out);
        out
    }
}
