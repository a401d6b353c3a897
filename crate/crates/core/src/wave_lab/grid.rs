use std::path::Path;

use crate::error::{Error, Result};

/// Vector-valued samples on a uniform grid, read as a continuous piecewise-linear function
/// that vanishes outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x0: f64,
    dx: f64,
    nodes: usize,
    dim: usize,
    data: Vec<f64>,
}

/// `∫|a + (b−a)s| ds` over `[0, 1]`, exact for a linear segment.
pub(crate) fn segment_abs_integral(a: f64, b: f64) -> f64 {
    if (a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0) {
        0.5 * (a.abs() + b.abs())
    } else {
        0.5 * (a * a + b * b) / (a.abs() + b.abs())
    }
}

impl GridFunction {
    pub fn from_data(x0: f64, dx: f64, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::ShapeMismatch(format!("{} samples for dimension {dim}", data.len())));
        }
        let nodes = data.len() / dim;
        if nodes < 2 {
            return Err(Error::ShapeMismatch("a grid function needs at least two nodes".into()));
        }
        if !(dx > 0.0) || !x0.is_finite() {
            return Err(Error::ShapeMismatch(format!("invalid grid x0 = {x0}, dx = {dx}")));
        }
        Ok(GridFunction { x0, dx, nodes, dim, data })
    }

    /// Zero function on `[x_min, x_max]` split into `cells` cells.
    pub fn zeros(x_min: f64, x_max: f64, cells: usize, dim: usize) -> Result<Self> {
        if !(x_max > x_min) || cells == 0 {
            return Err(Error::ShapeMismatch(format!("empty grid [{x_min}, {x_max}] with {cells} cells")));
        }
        let dx = (x_max - x_min) / cells as f64;
        Self::from_data(x_min, dx, dim, vec![0.0; (cells + 1) * dim])
    }

    pub fn from_fn(x_min: f64, x_max: f64, cells: usize, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Result<Self> {
        let mut g = Self::zeros(x_min, x_max, cells, dim)?;
        for j in 0..g.nodes {
            let x = g.x(j);
            f(x, &mut g.data[j * dim..(j + 1) * dim]);
        }
        Ok(g)
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }
    pub fn x_min(&self) -> f64 {
        self.x0
    }
    pub fn x_max(&self) -> f64 {
        self.x(self.nodes - 1)
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn cells(&self) -> usize {
        self.nodes - 1
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn state(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }
    pub fn state_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.dim + k]
    }
    pub fn component(&self, k: usize) -> Vec<f64> {
        (0..self.nodes).map(|j| self.value(j, k)).collect()
    }

    /// Scalar grid function holding component `k`.
    pub fn component_fn(&self, k: usize) -> GridFunction {
        GridFunction { x0: self.x0, dx: self.dx, nodes: self.nodes, dim: 1, data: self.component(k) }
    }

    /// Same grid within `1e−12` relative tolerance.
    pub fn same_grid(&self, other: &GridFunction) -> bool {
        let tol = 1e-12 * (1.0 + self.x0.abs().max(self.x_max().abs()));
        self.nodes == other.nodes
            && self.dim == other.dim
            && (self.x0 - other.x0).abs() <= tol
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Piecewise-linear value at `x` (zero outside the grid).
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        let s = (x - self.x0) / self.dx;
        if !(s >= 0.0) || s > (self.nodes - 1) as f64 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let j = (s.floor() as usize).min(self.nodes - 2);
        let t = s - j as f64;
        for k in 0..self.dim {
            out[k] = (1.0 - t) * self.value(j, k) + t * self.value(j + 1, k);
        }
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    /// `x ↦ f(−x)`.
    pub fn flipped(&self) -> GridFunction {
        let mut data = Vec::with_capacity(self.data.len());
        for j in (0..self.nodes).rev() {
            data.extend_from_slice(self.state(j));
        }
        GridFunction { x0: -self.x_max(), dx: self.dx, nodes: self.nodes, dim: self.dim, data }
    }

    /// Piecewise-linear resampling onto a new uniform grid.
    pub fn resample(&self, x_min: f64, x_max: f64, cells: usize) -> Result<GridFunction> {
        let dim = self.dim;
        GridFunction::from_fn(x_min, x_max, cells, dim, |x, out| self.eval_into(x, out))
    }

    /// Every other node; requires an even number of cells.
    pub fn coarsened(&self) -> Result<GridFunction> {
        if self.cells() % 2 != 0 {
            return Err(Error::GridMismatch("coarsening needs an even cell count".into()));
        }
        let mut data = Vec::with_capacity((self.cells() / 2 + 1) * self.dim);
        for j in (0..self.nodes).step_by(2) {
            data.extend_from_slice(self.state(j));
        }
        GridFunction::from_data(self.x0, 2.0 * self.dx, self.dim, data)
    }

    fn node_norm(&self, j: usize) -> f64 {
        self.state(j).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `sup_x |u(x)|` with the Euclidean norm on states.
    pub fn sup_norm(&self) -> f64 {
        (0..self.nodes).map(|j| self.node_norm(j)).fold(0.0, f64::max)
    }

    pub fn component_sup(&self, k: usize) -> f64 {
        (0..self.nodes).map(|j| self.value(j, k).abs()).fold(0.0, f64::max)
    }

    /// `sup_x |u_x(x)|` of the interpolant (Euclidean norm of segment slopes).
    pub fn slope_sup(&self) -> f64 {
        (0..self.nodes - 1)
            .map(|j| {
                let s: f64 = (0..self.dim).map(|k| (self.value(j + 1, k) - self.value(j, k)).powi(2)).sum();
                s.sqrt() / self.dx
            })
            .fold(0.0, f64::max)
    }

    pub fn component_slope_sup(&self, k: usize) -> f64 {
        (0..self.nodes - 1)
            .map(|j| (self.value(j + 1, k) - self.value(j, k)).abs() / self.dx)
            .fold(0.0, f64::max)
    }

    /// Largest positive slope of component `k`.
    pub fn component_max_forward_slope(&self, k: usize) -> f64 {
        (0..self.nodes - 1)
            .map(|j| (self.value(j + 1, k) - self.value(j, k)) / self.dx)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact `∫|u_k|` of the interpolant.
    pub fn component_l1(&self, k: usize) -> f64 {
        (0..self.nodes - 1).map(|j| segment_abs_integral(self.value(j, k), self.value(j + 1, k))).sum::<f64>() * self.dx
    }

    /// `Σ_k ∫|u_k|`.
    pub fn l1_norm(&self) -> f64 {
        (0..self.dim).map(|k| self.component_l1(k)).sum()
    }

    /// Exact `∫u_k` of the interpolant.
    pub fn integral(&self, k: usize) -> f64 {
        let inner: f64 = (1..self.nodes - 1).map(|j| self.value(j, k)).sum();
        (inner + 0.5 * (self.value(0, k) + self.value(self.nodes - 1, k))) * self.dx
    }

    /// Total variation with the Euclidean norm on increments.
    pub fn total_variation(&self) -> f64 {
        (0..self.nodes - 1)
            .map(|j| {
                (0..self.dim).map(|k| (self.value(j + 1, k) - self.value(j, k)).powi(2)).sum::<f64>().sqrt()
            })
            .sum()
    }

    pub fn component_total_variation(&self, k: usize) -> f64 {
        (0..self.nodes - 1).map(|j| (self.value(j + 1, k) - self.value(j, k)).abs()).sum()
    }

    /// Smallest interval containing every node with `|u| > threshold`.
    pub fn support(&self, threshold: f64) -> Option<(f64, f64)> {
        let first = (0..self.nodes).find(|&j| self.node_norm(j) > threshold)?;
        let last = (0..self.nodes).rev().find(|&j| self.node_norm(j) > threshold)?;
        Some((self.x(first), self.x(last)))
    }

    pub fn component_support(&self, k: usize, threshold: f64) -> Option<(f64, f64)> {
        let first = (0..self.nodes).find(|&j| self.value(j, k).abs() > threshold)?;
        let last = (0..self.nodes).rev().find(|&j| self.value(j, k).abs() > threshold)?;
        Some((self.x(first), self.x(last)))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e))?;
        let mut header = vec!["x".to_string()];
        header.extend((1..=self.dim).map(|k| format!("u{k}")));
        w.write_record(&header).map_err(|e| Error::io(path, e))?;
        for j in 0..self.nodes {
            let mut row = vec![self.x(j).to_string()];
            row.extend(self.state(j).iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<GridFunction> {
        let path = path.as_ref();
        let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
        let dim = r.headers().map_err(|e| Error::io(path, e))?.len().saturating_sub(1);
        let mut xs = Vec::new();
        let mut data = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::io(path, e))?;
            let mut it = rec.iter().map(|s| s.trim().parse::<f64>());
            xs.push(it.next().ok_or_else(|| Error::io(path, "empty row"))?.map_err(|e| Error::io(path, e))?);
            for v in it {
                data.push(v.map_err(|e| Error::io(path, e))?);
            }
        }
        if xs.len() < 2 {
            return Err(Error::io(path, "need at least two rows"));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (j, x) in xs.iter().enumerate() {
            if (x - (xs[0] + j as f64 * dx)).abs() > 1e-12 * (1.0 + x.abs()) {
                return Err(Error::GridMismatch(format!("{}: non-uniform spacing at row {j}", path.display())));
            }
        }
        GridFunction::from_data(xs[0], dx, dim, data)
    }
}

/// Exact `Σ_k ∫|f_k − g_k|` for grid functions on a shared grid.
pub fn l1_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch(format!(
            "grids [{}, {}]x{} and [{}, {}]x{} differ",
            f.x_min(),
            f.x_max(),
            f.nodes(),
            g.x_min(),
            g.x_max(),
            g.nodes()
        )));
    }
    let dim = f.dim();
    let mut total = 0.0;
    for k in 0..dim {
        let mut acc = 0.0;
        for j in 0..f.nodes() - 1 {
            acc += segment_abs_integral(f.value(j, k) - g.value(j, k), f.value(j + 1, k) - g.value(j + 1, k));
        }
        total += acc * f.dx();
    }
    Ok(total)
}
