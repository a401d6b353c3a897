use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{eigen_decompose_with, gammas_from, EigenOptions};
use super::models::FluxModel;
use crate::error::{Error, Result};

/// Options for the lattice approximation of suprema over `B_d̄`.
#[derive(Debug, Clone, Copy)]
pub struct LatticeOptions {
    /// Points per axis of the cube `[-d̄, d̄]^N`; only points inside the closed ball are used.
    pub points_per_axis: usize,
    pub eigen: EigenOptions,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions { points_per_axis: 41, eigen: EigenOptions::default() }
    }
}

/// Which formula produced `L_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LtKind {
    /// `L + (Δ∨λ/2)·T`.
    General,
    /// `L + sup α_ij √(8NmT/c)`.
    Temple,
}

/// All constants entering the entropy bounds, for one model, ball radius and `(δ₀, L, T)`.
///
/// For `N = 1`, `Δ∧λ` is `+∞` and serializes to `null`; `α₅ = 0`, `c̄₁ = 1` and
/// `c̄₄ = c̄₇ = 0` are the corresponding limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub model: String,
    pub dim: usize,
    pub ball_radius: f64,
    pub lattice_points: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    pub alpha5: f64,
    pub alpha6: f64,
    #[serde(rename = "alpha1p")]
    pub alpha1_prime: f64,
    #[serde(rename = "alpha1pp")]
    pub alpha1_dblprime: f64,
    pub alpha_ij: Vec<Vec<f64>>,
    /// Derivative form of `sup Γ₃`.
    pub alpha3_dr: f64,
    /// Lie-bracket form of `sup Γ₃`.
    pub alpha3_lie: f64,
    #[serde(rename = "dl_min", with = "extended_real")]
    pub delta_lambda_min: f64,
    #[serde(rename = "dl_max")]
    pub delta_lambda_max: f64,
    pub lambda0: Vec<f64>,
    /// `sup_i sup_u |λ_i(u)|`, used for CFL restrictions.
    pub speed_max: f64,
    pub cbar1: f64,
    #[serde(with = "extended_real")]
    pub cbar2: f64,
    pub cbar3: f64,
    pub cbar4: f64,
    pub cbar5: f64,
    pub cbar6: f64,
    pub cbar7: f64,
    pub c1: f64,
    #[serde(with = "extended_real")]
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c_gnl: f64,
    pub delta0: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "L_T")]
    pub l_t: f64,
    pub l_t_kind: LtKind,
}

mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone)]
struct Sups {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    alpha3_dr: f64,
    alpha3_lie: f64,
    cross: f64,
    alpha4: f64,
    alpha6: f64,
    alpha1p: f64,
    alpha_ij: Vec<Vec<f64>>,
    c_gnl: f64,
    lambda_hi: f64,
    lambda_lo: f64,
    speed: f64,
}

impl Sups {
    fn new(n: usize) -> Self {
        Sups {
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
            alpha3_dr: 0.0,
            alpha3_lie: 0.0,
            cross: 0.0,
            alpha4: 0.0,
            alpha6: 0.0,
            alpha1p: 0.0,
            alpha_ij: vec![vec![0.0; n]; n],
            c_gnl: f64::INFINITY,
            lambda_hi: f64::NEG_INFINITY,
            lambda_lo: f64::INFINITY,
            speed: 0.0,
        }
    }

    fn merge(mut self, o: Sups) -> Sups {
        self.alpha1 = self.alpha1.max(o.alpha1);
        self.alpha2 = self.alpha2.max(o.alpha2);
        self.alpha3 = self.alpha3.max(o.alpha3);
        self.alpha3_dr = self.alpha3_dr.max(o.alpha3_dr);
        self.alpha3_lie = self.alpha3_lie.max(o.alpha3_lie);
        self.cross = self.cross.max(o.cross);
        self.alpha4 = self.alpha4.max(o.alpha4);
        self.alpha6 = self.alpha6.max(o.alpha6);
        self.alpha1p = self.alpha1p.max(o.alpha1p);
        for (row, orow) in self.alpha_ij.iter_mut().zip(&o.alpha_ij) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a = a.max(*b);
            }
        }
        self.c_gnl = self.c_gnl.min(o.c_gnl);
        self.lambda_hi = self.lambda_hi.max(o.lambda_hi);
        self.lambda_lo = self.lambda_lo.min(o.lambda_lo);
        self.speed = self.speed.max(o.speed);
        self
    }
}

/// Lattice points of `[-d̄, d̄]^N` inside the closed ball.
pub fn ball_lattice(dim: usize, radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(2);
    let coord = |k: usize| -radius + 2.0 * radius * k as f64 / (per_axis - 1) as f64;
    let total = per_axis.pow(dim as u32);
    (0..total)
        .filter_map(|mut idx| {
            let mut u = Vec::with_capacity(dim);
            for _ in 0..dim {
                u.push(coord(idx % per_axis));
                idx /= per_axis;
            }
            let r2: f64 = u.iter().map(|v| v * v).sum();
            (r2 <= radius * radius * (1.0 + 1e-12)).then_some(u)
        })
        .collect()
}

fn sample(model: &dyn FluxModel, u: &[f64], opts: &EigenOptions) -> Result<Sups> {
    let n = model.dim();
    let es = eigen_decompose_with(model, u, opts)?;
    let g = gammas_from(&es);
    let mut s = Sups::new(n);
    s.alpha1 = g.grad_lambda_sup;
    s.alpha2 = g.gamma2;
    s.alpha3 = g.gamma3;
    s.alpha3_dr = g.gamma3_dr;
    s.alpha3_lie = g.gamma3_lie;
    s.cross = g.gamma3_cross;
    s.alpha4 = g.gamma4;
    s.alpha6 = es.dr.iter().map(|m| m.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            let v = es.grad_lambda[i].dot(&es.right(j)).abs();
            s.alpha_ij[i][j] = v;
            if i == j {
                s.alpha1p = s.alpha1p.max(v);
                s.c_gnl = s.c_gnl.min(v);
            }
        }
    }
    s.lambda_hi = es.lambda[n - 1];
    s.lambda_lo = es.lambda[0];
    s.speed = es.lambda.iter().map(|l| l.abs()).fold(0.0, f64::max);
    Ok(s)
}

pub fn compute_constants(model: &dyn FluxModel, delta0: f64, l: f64, t: f64) -> Result<ConstantsRecord> {
    compute_constants_with(model, delta0, l, t, &LatticeOptions::default())
}

pub fn compute_constants_with(
    model: &dyn FluxModel,
    delta0: f64,
    l: f64,
    t: f64,
    opts: &LatticeOptions,
) -> Result<ConstantsRecord> {
    let n = model.dim();
    if n > 3 {
        return Err(Error::Config(format!("lattice sampling supports N <= 3, got {n}")));
    }
    let points = ball_lattice(n, model.ball_radius(), opts.points_per_axis);
    let sups = points
        .par_iter()
        .map(|u| sample(model, u, &opts.eigen))
        .try_reduce(|| Sups::new(n), |a, b| Ok(a.merge(b)))?;

    let zero = vec![0.0; n];
    let lambda0 = model.eigenvalues(&zero);
    let spread0 = lambda0[n - 1] - lambda0[0];
    let dl_min = if n == 1 {
        f64::INFINITY
    } else {
        (1..n).map(|i| lambda0[i] - lambda0[i - 1]).fold(f64::INFINITY, f64::min)
    };
    let alpha1pp = sups.alpha_ij.iter().flatten().copied().fold(0.0, f64::max);
    let (alpha5, cbar1) = if n == 1 { (0.0, 1.0) } else { (spread0 / dl_min, dl_min / (dl_min + spread0)) };
    let cbar2 = dl_min;
    let cbar3 = 2.0 * sups.alpha1;
    let cbar5 = 8.0 * sups.alpha4;
    let (cbar4, cbar7) = if n == 1 {
        (0.0, 0.0)
    } else {
        (
            cbar5 / (2.0 * cbar2) * sups.alpha3.max(sups.cross + sups.alpha1),
            2.0 * alpha1pp / cbar2,
        )
    };
    let cbar6 = 2.0 * sups.alpha1p;
    let ln2 = std::f64::consts::LN_2;
    let delta_lambda_max = sups.lambda_hi - sups.lambda_lo;

    Ok(ConstantsRecord {
        model: model.name().to_string(),
        dim: n,
        ball_radius: model.ball_radius(),
        lattice_points: points.len(),
        alpha1: sups.alpha1,
        alpha2: sups.alpha2,
        alpha3: sups.alpha3,
        alpha4: sups.alpha4,
        alpha5,
        alpha6: sups.alpha6,
        alpha1_prime: sups.alpha1p,
        alpha1_dblprime: alpha1pp,
        alpha_ij: sups.alpha_ij,
        alpha3_dr: sups.alpha3_dr,
        alpha3_lie: sups.alpha3_lie,
        delta_lambda_min: dl_min,
        delta_lambda_max,
        lambda0,
        speed_max: sups.speed,
        cbar1,
        cbar2,
        cbar3,
        cbar4,
        cbar5,
        cbar6,
        cbar7,
        c1: cbar1,
        c2: cbar2,
        c3: 216.0 * ln2 * cbar3,
        c4: 216.0 * ln2 * cbar4,
        c5: 216.0 * ln2 * cbar5,
        c6: 108.0 * ln2 * cbar6,
        c7: 108.0 * ln2 * cbar7,
        c_gnl: sups.c_gnl,
        delta0,
        l,
        t,
        l_t: l + 0.5 * delta_lambda_max * t,
        l_t_kind: LtKind::General,
    })
}

impl ConstantsRecord {
    /// `sup_{i,j} α_ij`.
    pub fn alpha_ij_max(&self) -> f64 {
        self.alpha_ij.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// `e^{α₂/α₃}` with `e⁰ = 1` when `α₃ = 0`.
    pub fn exp_ratio(&self) -> f64 {
        if self.alpha3 > 0.0 {
            (self.alpha2 / self.alpha3).exp()
        } else {
            1.0
        }
    }

    /// Radius `L + sup α_ij √(8Nmt/c)` of the support window for GNL Temple systems.
    pub fn temple_radius(&self, l: f64, m: f64, t: f64, c: f64) -> f64 {
        l + self.alpha_ij_max() * (8.0 * self.dim as f64 * m * t / c).sqrt()
    }

    /// Copy with `L_T` replaced by the Temple radius at time `T`.
    pub fn with_temple_l_t(&self, m: f64, c: f64) -> ConstantsRecord {
        let mut out = self.clone();
        out.l_t = self.temple_radius(self.l, m, self.t, c);
        out.l_t_kind = LtKind::Temple;
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("constants serialize")
    }
}
