use nalgebra::{DMatrix, DVector};

use super::models::FluxModel;
use crate::error::{Error, Result};

/// Settings for eigen-decomposition and finite differences.
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Finite-difference step as a fraction of the ball radius.
    pub fd_step_fraction: f64,
    /// Minimal admissible gap between consecutive eigenvalues.
    pub gap_floor: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { fd_step_fraction: 1e-5, gap_floor: 1e-8 }
    }
}

/// Eigenstructure and its first derivatives at one state.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub state: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Right eigenvectors as columns.
    pub r: DMatrix<f64>,
    /// Left eigenvectors as rows.
    pub l: DMatrix<f64>,
    /// `dr[j][(m, n)] = ∂r_j^m / ∂u_n`.
    pub dr: Vec<DMatrix<f64>>,
    pub grad_lambda: Vec<DVector<f64>>,
    /// `lie[j][k] = [r_j, r_k] = Dr_k r_j − Dr_j r_k`.
    pub lie: Vec<Vec<DVector<f64>>>,
}

impl EigenStructure {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn right(&self, i: usize) -> DVector<f64> {
        self.r.column(i).into_owned()
    }

    pub fn left(&self, i: usize) -> DVector<f64> {
        self.l.row(i).transpose()
    }

    /// Row vector `l_iᵀ Dr_j` as a column.
    pub fn l_dr(&self, i: usize, j: usize) -> DVector<f64> {
        (self.l.row(i) * &self.dr[j]).transpose()
    }
}

fn in_domain(model: &dyn FluxModel, u: &[f64]) -> bool {
    match model.chart() {
        Some(chart) => chart.contains(&(chart.to_riemann)(u)) || model.contains(u),
        None => model.contains(u),
    }
}

pub fn eigen_decompose(model: &dyn FluxModel, u: &[f64]) -> Result<EigenStructure> {
    eigen_decompose_with(model, u, &EigenOptions::default())
}

pub fn eigen_decompose_with(model: &dyn FluxModel, u: &[f64], opts: &EigenOptions) -> Result<EigenStructure> {
    let n = model.dim();
    if u.len() != n {
        return Err(Error::ShapeMismatch(format!("state of length {} for N = {n}", u.len())));
    }
    if !in_domain(model, u) {
        return Err(Error::OutOfDomain { state: u.to_vec() });
    }
    let lambda = model.eigenvalues(u);
    for i in 1..n {
        let gap = lambda[i] - lambda[i - 1];
        if !(gap >= opts.gap_floor) {
            return Err(Error::NonHyperbolic { gap, state: u.to_vec() });
        }
    }
    let r = model.right_eigenvectors(u);
    let l = model.left_eigenvectors(u);

    let step = opts.fd_step_fraction * model.ball_radius();
    let mut dr = vec![DMatrix::zeros(n, n); n];
    let mut grad_lambda = vec![DVector::zeros(n); n];
    let mut plus = u.to_vec();
    let mut minus = u.to_vec();
    for m in 0..n {
        plus[m] = u[m] + step;
        minus[m] = u[m] - step;
        let rp = model.right_eigenvectors(&plus);
        let rm = model.right_eigenvectors(&minus);
        let lp = model.eigenvalues(&plus);
        let lm = model.eigenvalues(&minus);
        for j in 0..n {
            for c in 0..n {
                dr[j][(c, m)] = (rp[(c, j)] - rm[(c, j)]) / (2.0 * step);
            }
            grad_lambda[j][m] = (lp[j] - lm[j]) / (2.0 * step);
        }
        plus[m] = u[m];
        minus[m] = u[m];
    }

    let mut lie = vec![vec![DVector::zeros(n); n]; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let rj = r.column(j);
            let rk = r.column(k);
            let bracket = &dr[k] * rj - &dr[j] * rk;
            lie[k][j] = -bracket.clone();
            lie[j][k] = bracket;
        }
    }

    Ok(EigenStructure { state: u.to_vec(), lambda, r, l, dr, grad_lambda, lie })
}

/// Pointwise quantities `Γ₂, Γ₃, Γ₄` together with the two forms of `Γ₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gammas {
    pub gamma2: f64,
    /// Larger of the derivative form and the Lie-bracket form.
    pub gamma3: f64,
    pub gamma4: f64,
    /// `sup |λ_k − λ_j| |l_iᵀ Dr_k| + sup |∇λ_i|`.
    pub gamma3_dr: f64,
    /// `sup |½(λ_k − λ_j) l_i·[r_j, r_k] − δ_ik ∇λ_i·r_j|`.
    pub gamma3_lie: f64,
    /// `sup |λ_k − λ_j| |l_iᵀ Dr_k|` alone.
    pub gamma3_cross: f64,
    /// `sup |∇λ_i|` alone.
    pub grad_lambda_sup: f64,
}

pub fn gammas_from(es: &EigenStructure) -> Gammas {
    let n = es.dim();
    let mut gamma2 = 0.0f64;
    let mut cross = 0.0f64;
    let mut lie_form = 0.0f64;
    for i in 0..n {
        let li = es.left(i);
        for j in 0..n {
            let l_dr_j = es.l_dr(i, j).norm();
            for k in 0..n {
                gamma2 = gamma2.max((es.lambda[k] - es.lambda[i]).abs() * l_dr_j);
                let l_dr_k = es.l_dr(i, k).norm();
                cross = cross.max((es.lambda[k] - es.lambda[j]).abs() * l_dr_k);
                let mut g = 0.5 * (es.lambda[k] - es.lambda[j]) * li.dot(&es.lie[j][k]);
                if i == k {
                    g -= es.grad_lambda[i].dot(&es.right(j));
                }
                lie_form = lie_form.max(g.abs());
            }
        }
    }
    let grad_sup = es.grad_lambda.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let gamma4 = (0..n).map(|i| es.left(i).norm()).fold(0.0, f64::max);
    let gamma3_dr = cross + grad_sup;
    Gammas {
        gamma2,
        gamma3: gamma3_dr.max(lie_form),
        gamma4,
        gamma3_dr,
        gamma3_lie: lie_form,
        gamma3_cross: cross,
        grad_lambda_sup: grad_sup,
    }
}

pub fn compute_gammas(model: &dyn FluxModel, u: &[f64]) -> Result<Gammas> {
    Ok(gammas_from(&eigen_decompose(model, u)?))
}
