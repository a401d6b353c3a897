use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::temple_dynamics::diagonal_evolve;
use crate::wave_lab::{
    backward_bounds, forward_bounds, l1_distance, sawtooth_profile, temple_backward_bounds, temple_forward_bounds,
    BackwardChecks, ControlParams, EvolutionDiagnostics, GridFunction, Lab, LabOptions, SupportLayout,
};

/// One sampled terminal state and its reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripCase {
    pub index: usize,
    pub teeth: usize,
    pub h: f64,
    pub b: f64,
    pub checks: BackwardChecks,
    /// `‖S_T ū − ψ‖₁`.
    pub error: f64,
    /// Four times the summed grid-doubling estimates of the backward and forward runs.
    pub budget: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub l_tilde: f64,
    pub cases: Vec<RoundtripCase>,
    /// Largest `error/budget`.
    pub worst_ratio: f64,
    pub all_passed: bool,
    #[serde(skip)]
    pub diagnostics: Vec<EvolutionDiagnostics>,
}

/// Evolves `u0` forward to `t`; returns the solution and its grid-doubling estimate.
fn forward(lab: &Lab, u0: &GridFunction, t: f64) -> Result<(GridFunction, f64)> {
    if lab.model().chart().is_none() {
        let (u, diag) = lab.evolve_grid(u0, t)?;
        return Ok((u, diag.richardson_l1.unwrap_or(0.0)));
    }
    let (u, _) = diagonal_evolve(lab, u0, t)?;
    let coarse_opts = LabOptions { picard_time_levels: (lab.options.picard_time_levels / 2).max(1), ..lab.options.clone() };
    let coarse_lab = Lab::with_options(lab.model_arc(), lab.constants().clone(), coarse_opts)?;
    let (v, _) = diagonal_evolve(&coarse_lab, &u0.coarsened()?, t)?;
    let est = l1_distance(&u.coarsened()?.resample(v.x_min(), v.x_max(), v.cells())?, &v)?;
    Ok((u, est))
}

/// Samples terminal states `ψ`, rebuilds their initial data and evolves them forward again.
pub fn run_roundtrip_experiment(cfg: &ExperimentConfig) -> Result<RoundtripReport> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let c = &s.constants;
    let lab = &s.lab;
    let params = ControlParams { l: cfg.l, m: cfg.m, big_m: cfg.big_m, delta0: cfg.delta0 };
    let chart = s.model.chart();
    let bb = match &chart {
        Some(ch) => temple_backward_bounds(c, ch.d_prime, &params, cfg.t),
        None => backward_bounds(c, &params, cfg.t),
    };
    let l_tilde = bb.l_tilde;
    let fb = match &chart {
        Some(ch) => temple_forward_bounds(c, ch.d_prime, l_tilde, cfg.t),
        None => forward_bounds(c, l_tilde, cfg.t),
    };
    let b = 0.9 * bb.b_max.min(fb.b_max);
    let h_cap = bb.h_max.min(fb.d_max);
    let layout = SupportLayout::new(&c.lambda0, l_tilde, cfg.t);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = Vec::with_capacity(cfg.samples);
    let mut diagnostics = Vec::new();
    for index in 0..cfg.samples {
        let teeth = rng.gen_range(1..=6);
        let h = h_cap.min(l_tilde * b / (2.0 * teeth as f64)) * rng.gen_range(0.5..=1.0);
        let profiles = (0..c.dim)
            .map(|i| {
                let code: Vec<bool> = (0..teeth).map(|_| rng.gen()).collect();
                sawtooth_profile(teeth, h, l_tilde, &code, layout.xi_minus[i])
            })
            .collect::<Result<Vec<_>>>()?;
        let psi = lab.assemble_phi(&profiles, &layout)?.flipped();
        let back = lab.backward_generate(&psi, &layout, &params, h, b)?;
        let (u_t, fwd_est) = forward(lab, &back.u_bar, cfg.t)?;
        let error = l1_distance(&u_t.resample(psi.x_min(), psi.x_max(), psi.cells())?, &psi)?;
        let budget = 4.0 * (fwd_est + back.diagnostics.richardson_l1.unwrap_or(0.0));
        let passed = error <= budget;
        if !passed {
            log::warn!("roundtrip {index}: error {error:.3e} above budget {budget:.3e}");
        }
        diagnostics.push(back.diagnostics);
        cases.push(RoundtripCase { index, teeth, h, b, checks: back.checks, error, budget, passed });
    }
    if cases.is_empty() {
        return Err(Error::Config("roundtrip needs samples >= 1".into()));
    }
    let worst_ratio = cases
        .iter()
        .map(|k| match (k.error, k.budget) {
            (e, _) if e == 0.0 => 0.0,
            (e, b) if b > 0.0 => e / b,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let all_passed = cases.iter().all(|k| k.passed);
    Ok(RoundtripReport { l_tilde, cases, worst_ratio, all_passed, diagnostics })
}
