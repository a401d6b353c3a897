use serde::{Deserialize, Serialize};

use super::bounds::{backward_bounds, temple_backward_bounds, BackwardBounds, ControlParams};
use super::grid::GridFunction;
use super::lab::Lab;
use super::profile::SupportLayout;
use super::superposition::EvolutionDiagnostics;
use crate::error::{Error, Result};

/// Measured properties of `ū` next to the bounds they must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardChecks {
    pub support: Option<(f64, f64)>,
    pub sup: f64,
    pub sup_bound: f64,
    pub l1: f64,
    pub l1_bound: f64,
    pub tv: f64,
    pub tv_bound: f64,
}

#[derive(Debug, Clone)]
pub struct BackwardResult {
    /// `ū(x) = ω(T, −x)`.
    pub u_bar: GridFunction,
    pub diagnostics: EvolutionDiagnostics,
    pub bounds: BackwardBounds,
    pub checks: BackwardChecks,
}

impl Lab {
    /// Builds initial data `ū` whose entropy solution at `T` is `ψ`.
    ///
    /// `ψ` must be a superposition of simple waves in the layout of `L̃ = layout.l`;
    /// `h` and `b` are its declared amplitude and slope bounds.
    pub fn backward_generate(
        &self,
        psi: &GridFunction,
        layout: &SupportLayout,
        params: &ControlParams,
        h: f64,
        b: f64,
    ) -> Result<BackwardResult> {
        let c = self.constants();
        let t = layout.t;
        let chart = self.model().chart();
        let bounds = match &chart {
            Some(ch) => temple_backward_bounds(c, ch.d_prime, params, t),
            None => backward_bounds(c, params, t),
        };
        let tol = 1.0 + 1e-9;
        if chart.is_none() && !(params.big_m < c.ball_radius) {
            return Err(Error::ParameterViolation(format!("M = {} must be below d̄ = {}", params.big_m, c.ball_radius)));
        }
        if layout.l > bounds.l_tilde * tol {
            return Err(Error::ParameterViolation(format!("L̃ = {} exceeds {}", layout.l, bounds.l_tilde)));
        }
        if b > bounds.b_max * tol {
            return Err(Error::ParameterViolation(format!("b = {b} exceeds {} ({})", bounds.b_max, bounds.b_binder)));
        }
        if h > bounds.h_max * tol {
            return Err(Error::ParameterViolation(format!("h = {h} exceeds {} ({})", bounds.h_max, bounds.h_binder)));
        }
        let amplitude = |g: &GridFunction| match chart {
            Some(_) => (0..g.dim()).map(|k| g.component_sup(k)).fold(0.0, f64::max),
            None => g.sup_norm(),
        };
        let slope = |g: &GridFunction| match chart {
            Some(_) => (0..g.dim()).map(|k| g.component_slope_sup(k)).fold(0.0, f64::max),
            None => g.slope_sup(),
        };
        if amplitude(psi) > h * tol || slope(psi) > b * tol {
            return Err(Error::ParameterViolation(format!(
                "psi has amplitude {} and slope {} above the declared h = {h}, b = {b}",
                amplitude(psi),
                slope(psi)
            )));
        }
        let phi = psi.flipped();
        let (omega, diagnostics) = self.evolve_superposition(&phi, layout)?;
        let u_bar = omega.flipped();

        let n = c.dim as f64;
        let slack = 1e-9;
        let support = u_bar.support(self.options.support_threshold.max(1e-10));
        let checks = match chart {
            Some(_) => BackwardChecks {
                support,
                sup: amplitude(&u_bar),
                sup_bound: h.min(params.big_m),
                l1: u_bar.l1_norm(),
                l1_bound: params.m,
                tv: u_bar.total_variation(),
                tv_bound: f64::INFINITY,
            },
            None => BackwardChecks {
                support,
                sup: u_bar.sup_norm(),
                sup_bound: (2.0 * c.alpha4 * n * c.exp_ratio() * h).min(params.big_m),
                l1: u_bar.l1_norm(),
                l1_bound: (2.0 * params.l * h).min(params.m),
                tv: u_bar.total_variation(),
                tv_bound: params.delta0,
            },
        };
        if let Some((a, z)) = checks.support {
            if a < -params.l - slack || z > params.l + slack {
                return Err(Error::ConstructionBreach(format!("support [{a}, {z}] leaves [-L, L] with L = {}", params.l)));
            }
        }
        if checks.sup > checks.sup_bound + slack {
            return Err(Error::ConstructionBreach(format!("sup |u| = {} above {}", checks.sup, checks.sup_bound)));
        }
        if checks.l1 > checks.l1_bound + slack {
            return Err(Error::ConstructionBreach(format!("||u||_1 = {} above {}", checks.l1, checks.l1_bound)));
        }
        if checks.tv > checks.tv_bound + slack {
            return Err(Error::ConstructionBreach(format!("TV(u) = {} above {}", checks.tv, checks.tv_bound)));
        }
        Ok(BackwardResult { u_bar, diagnostics, bounds, checks })
    }
}
