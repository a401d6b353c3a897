use serde::{Deserialize, Serialize};

use crate::system_model::ConstantsRecord;

/// Largest admissible `(d, b)` for a forward superposition reaching time `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardBounds {
    pub d_max: f64,
    pub b_max: f64,
    pub d_binder: String,
    pub b_binder: String,
}

/// Class parameters of the controllability experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    /// Outer support half-length `L`.
    pub l: f64,
    /// Mass bound `m` on `‖u‖_{L¹}`.
    pub m: f64,
    /// Amplitude bound `M < d̄`.
    pub big_m: f64,
    pub delta0: f64,
}

/// Admissible `(L̃, h, b)` for the backward construction, with the active term of each minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardBounds {
    pub l_tilde: f64,
    pub h_max: f64,
    pub b_max: f64,
    pub h_binder: String,
    pub b_binder: String,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn argmin(terms: &[(&str, f64)]) -> (f64, String) {
    let mut best = (f64::INFINITY, String::from("none"));
    for &(name, v) in terms {
        if v < best.0 {
            best = (v, name.to_string());
        }
    }
    best
}

/// `d ≤ min{d̄, Δ/(2α₁)}/(2α₄N e^{α₂/α₃})`, `b ≤ min{1/(2α₁T), Δ/(4α₃α₄N²L)}`.
pub fn forward_bounds(c: &ConstantsRecord, l: f64, t: f64) -> ForwardBounds {
    let n = c.dim as f64;
    let e = c.exp_ratio();
    let dl = c.delta_lambda_min;
    let scale = 2.0 * c.alpha4 * n * e;
    let (d_max, d_binder) = argmin(&[
        ("domain", c.ball_radius / scale),
        ("gap", ratio(dl, 2.0 * c.alpha1) / scale),
    ]);
    let (b_max, b_binder) = argmin(&[
        ("horizon", ratio(1.0, 2.0 * c.alpha1 * t)),
        ("separation", ratio(dl, 4.0 * c.alpha3 * c.alpha4 * n * n * l)),
    ]);
    ForwardBounds { d_max, b_max, d_binder, b_binder }
}

/// Admissible parameters of the backward construction at time `T`.
pub fn backward_bounds(c: &ConstantsRecord, p: &ControlParams, t: f64) -> BackwardBounds {
    let n = c.dim as f64;
    let e = c.exp_ratio();
    let dl = c.delta_lambda_min;
    let l = p.l;
    let l_tilde = (l / (1.0 + c.alpha5)).min(t * dl);
    let (b_max, b_binder) = argmin(&[
        ("horizon", ratio(1.0, 2.0 * c.alpha1 * t)),
        ("separation", ratio(dl, 4.0 * c.alpha3 * c.alpha4 * n * n * l)),
        ("variation", ratio(p.delta0, 8.0 * c.alpha4 * n * l)),
    ]);
    let scale = 2.0 * c.alpha4 * n * e;
    let (h_max, h_binder) = argmin(&[
        ("domain", c.ball_radius / scale),
        ("gap", ratio(dl, 4.0 * c.alpha1 * c.alpha4 * n * e)),
        ("amplitude", p.big_m / scale),
        ("mass", p.m / (2.0 * l)),
    ]);
    BackwardBounds { l_tilde, h_max, b_max, h_binder, b_binder }
}

/// Rich-system variant: `d ≤ min{d̄′, Δ/(2α₁″√N)}`, `b ≤ min{1/(2α₁′T), Δ/(2α₁″NL)}`.
pub fn temple_forward_bounds(c: &ConstantsRecord, d_prime: f64, l: f64, t: f64) -> ForwardBounds {
    let n = c.dim as f64;
    let dl = c.delta_lambda_min;
    let (d_max, d_binder) = argmin(&[("domain", d_prime), ("gap", ratio(dl, 2.0 * c.alpha1_dblprime * n.sqrt()))]);
    let (b_max, b_binder) = argmin(&[
        ("horizon", ratio(1.0, 2.0 * c.alpha1_prime * t)),
        ("separation", ratio(dl, 2.0 * c.alpha1_dblprime * n * l)),
    ]);
    ForwardBounds { d_max, b_max, d_binder, b_binder }
}

/// Rich-system variant of [`backward_bounds`]; here `L̃ = L`.
pub fn temple_backward_bounds(c: &ConstantsRecord, d_prime: f64, p: &ControlParams, t: f64) -> BackwardBounds {
    let n = c.dim as f64;
    let dl = c.delta_lambda_min;
    let fb = temple_forward_bounds(c, d_prime, p.l, t);
    let (h_max, h_binder) = argmin(&[
        ("domain", d_prime),
        ("gap", ratio(dl, 2.0 * c.alpha1_dblprime * n.sqrt())),
        ("amplitude", p.big_m),
        ("mass", p.m / (2.0 * p.l)),
    ]);
    BackwardBounds { l_tilde: p.l, h_max, b_max: fb.b_max, h_binder, b_binder: fb.b_binder }
}
