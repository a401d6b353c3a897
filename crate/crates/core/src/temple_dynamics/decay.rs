use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system_model::ConstantsRecord;
use crate::wave_lab::GridFunction;

/// Oleĭnik one-sided bound `∂_x w_i ≤ 1/(ct)` measured on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub t: f64,
    pub family: usize,
    /// Largest forward difference quotient over adjacent nodes.
    pub quotient: f64,
    pub bound: f64,
    /// `bound − quotient`.
    pub margin: f64,
}

impl DecayCertificate {
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.quotient <= self.bound * (1.0 + rel_slack)
    }

    /// Relative excess `max(0, quotient/bound − 1)`.
    pub fn excess(&self) -> f64 {
        if self.bound.is_finite() && self.bound > 0.0 {
            (self.quotient / self.bound - 1.0).max(0.0)
        } else {
            0.0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// One certificate per component of `w` at time `t`.
pub fn oleinik_check(w: &GridFunction, t: f64, c: f64) -> Vec<DecayCertificate> {
    let bound = if t > 0.0 && c > 0.0 { 1.0 / (c * t) } else { f64::INFINITY };
    (0..w.dim())
        .map(|k| {
            let quotient = w.component_max_forward_slope(k).max(0.0);
            DecayCertificate { t, family: k, quotient, bound, margin: bound - quotient }
        })
        .collect()
}

/// `‖v‖∞ ≤ √(2B‖v‖₁)` for scalar `v` with `Dv ≤ B`; returns the bound and whether it holds.
pub fn linf_from_l1_bound(v: &GridFunction, b: f64) -> Result<(f64, bool)> {
    if v.dim() != 1 {
        return Err(Error::ShapeMismatch(format!("scalar profile expected, got {} components", v.dim())));
    }
    let slope = v.component_max_forward_slope(0);
    if slope > b * (1.0 + 1e-9) {
        return Err(Error::PreconditionFailed(format!("forward slope {slope} exceeds B = {b}")));
    }
    let bound = (2.0 * b * v.l1_norm()).sqrt();
    Ok((bound, v.sup_norm() <= bound * (1.0 + 1e-12)))
}

/// Predicted and measured support and amplitude of a Temple or scalar solution at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub t: f64,
    /// `L_t = L + sup α_ij √(8Nmt/c)`.
    pub l_t: f64,
    /// `L_t/(ct)`.
    pub sup_bound: f64,
    /// `√(2Nm/(ct))`, bound on `Σ_i ‖w_i‖∞`.
    pub sum_sup_bound: f64,
    /// Window `[−L_t + λ_i(0)t, L_t + λ_i(0)t]` per family.
    pub windows: Vec<(f64, f64)>,
    pub supports: Vec<Option<(f64, f64)>>,
    pub sups: Vec<f64>,
    pub holds: bool,
}

/// Compares `w(t)` against the support window and sup-norm bounds for data of mass `≤ m` on `[−L, L]`.
pub fn support_and_sup_bounds(c: &ConstantsRecord, w: &GridFunction, l: f64, m: f64, t: f64, c_gnl: f64) -> SupportReport {
    let n = w.dim();
    let l_t = c.temple_radius(l, m, t, c_gnl);
    let sup_bound = l_t / (c_gnl * t);
    let sum_sup_bound = (2.0 * n as f64 * m / (c_gnl * t)).sqrt();
    let slack = 2.0 * w.dx();
    let windows: Vec<(f64, f64)> = (0..n).map(|i| (-l_t + c.lambda0[i] * t, l_t + c.lambda0[i] * t)).collect();
    let supports: Vec<Option<(f64, f64)>> = (0..n).map(|i| w.component_support(i, 1e-12)).collect();
    let sups: Vec<f64> = (0..n).map(|i| w.component_sup(i)).collect();
    let inside = supports.iter().zip(&windows).all(|(s, &(a, b))| match s {
        Some((lo, hi)) => *lo >= a - slack && *hi <= b + slack,
        None => true,
    });
    let holds = inside
        && sups.iter().all(|&s| s <= sup_bound * (1.0 + 1e-9))
        && sups.iter().sum::<f64>() <= sum_sup_bound * (1.0 + 1e-9);
    SupportReport { t, l_t, sup_bound, sum_sup_bound, windows, supports, sups, holds }
}
