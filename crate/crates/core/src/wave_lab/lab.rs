use std::sync::Arc;

use super::grid::GridFunction;
use super::profile::{PiecewiseLinearProfile, SupportLayout};
use crate::error::{Error, Result};
use crate::system_model::{ConstantsRecord, FluxModel, RarefactionTable};

/// Numerical settings shared by the evolution routines.
#[derive(Debug, Clone)]
pub struct LabOptions {
    /// Cells of the output and interaction grids.
    pub cells: usize,
    /// Courant number of the Lax–Wendroff stage.
    pub cfl: f64,
    /// Number of diagnostic samples per evolution phase.
    pub diag_samples: usize,
    /// States with norm at most this value count as zero in support scans.
    pub support_threshold: f64,
    /// Bisection tolerance relative to the support length.
    pub bisection_tol: f64,
    pub picard_cap: usize,
    pub picard_tol: f64,
    /// Time levels used by characteristic tracing in Riemann coordinates.
    pub picard_time_levels: usize,
    /// Also run the interaction stage at half resolution and record the difference.
    pub richardson: bool,
}

impl Default for LabOptions {
    fn default() -> Self {
        LabOptions {
            cells: 1 << 14,
            cfl: 0.4,
            diag_samples: 32,
            support_threshold: 1e-12,
            bisection_tol: 1e-12,
            picard_cap: 50,
            picard_tol: 1e-10,
            picard_time_levels: 512,
            richardson: true,
        }
    }
}

/// A model together with its constants and tabulated rarefaction curves.
#[derive(Debug, Clone)]
pub struct Lab {
    model: Arc<dyn FluxModel>,
    constants: ConstantsRecord,
    tables: Vec<RarefactionTable>,
    pub options: LabOptions,
}

impl Lab {
    pub fn new(model: Arc<dyn FluxModel>, constants: ConstantsRecord) -> Result<Self> {
        Self::with_options(model, constants, LabOptions::default())
    }

    pub fn with_options(model: Arc<dyn FluxModel>, constants: ConstantsRecord, options: LabOptions) -> Result<Self> {
        let s_max = match model.chart() {
            Some(chart) => chart.d_prime,
            None => 0.999 * model.ball_radius(),
        };
        let tables = (0..model.dim())
            .map(|i| RarefactionTable::build(model.as_ref(), i, s_max, 4000))
            .collect::<Result<Vec<_>>>()?;
        Ok(Lab { model, constants, tables, options })
    }

    pub fn model(&self) -> &dyn FluxModel {
        self.model.as_ref()
    }

    pub fn model_arc(&self) -> Arc<dyn FluxModel> {
        Arc::clone(&self.model)
    }

    pub fn constants(&self) -> &ConstantsRecord {
        &self.constants
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Largest admissible rarefaction parameter.
    pub fn s_max(&self) -> f64 {
        self.tables[0].s_max
    }

    /// `φ_i(s) = R_i(s)`, or `W⁻¹(s e_i)` coordinates for chart models (written as `s e_i`).
    pub fn wave_state_into(&self, i: usize, s: f64, out: &mut [f64]) {
        if self.model.chart().is_some() {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[i] = s;
        } else {
            self.tables[i].eval_into(s, out);
        }
    }

    pub fn wave_state(&self, i: usize, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.wave_state_into(i, s, &mut out);
        out
    }

    /// Characteristic speed at a state given in the coordinates used by [`Lab::wave_state`].
    pub(crate) fn speed(&self, state: &[f64], i: usize) -> f64 {
        match self.model.chart() {
            Some(chart) => self.model.eigenvalue(&(chart.from_riemann)(state), i),
            None => self.model.eigenvalue(state, i),
        }
    }

    /// Lemma-type horizon `1/(2α₁b)` of a single simple wave.
    pub fn horizon(&self, b: f64) -> f64 {
        let a1 = self.constants.alpha1;
        if a1 == 0.0 || b == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (2.0 * a1 * b)
        }
    }

    /// `x_i(t, y) = y + λ_i(φ_i(y))·t`.
    pub fn characteristic_map(&self, i: usize, profile: &PiecewiseLinearProfile, t: f64, y: f64) -> f64 {
        let state = self.wave_state(i, profile.eval(y));
        y + self.speed(&state, i) * t
    }

    /// Value at `(t, x)` of the `i`-simple wave issuing from `φ_i^β`.
    pub fn simple_wave_eval(&self, i: usize, profile: &PiecewiseLinearProfile, t: f64, x: f64) -> Result<Vec<f64>> {
        let b = profile.max_slope();
        let horizon = self.horizon(b);
        if t > horizon * (1.0 + 1e-12) {
            return Err(Error::HorizonExceeded { t, horizon });
        }
        let zero = vec![0.0; self.dim()];
        let base = self.speed(&zero, i);
        let (a, c) = profile.support();
        if profile.is_zero() || x <= a + base * t || x >= c + base * t {
            return Ok(zero);
        }
        let tol = self.options.bisection_tol * (c - a);
        let (mut lo, mut hi) = (a, c);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.characteristic_map(i, profile, t, mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.wave_state(i, profile.eval(0.5 * (lo + hi))))
    }

    /// `φ^β(x) = Σ_i φ_i^{β_i}(x)` sampled on `cells` cells over `[x_min, x_max]`.
    pub fn assemble_phi_on(
        &self,
        profiles: &[PiecewiseLinearProfile],
        layout: &SupportLayout,
        x_min: f64,
        x_max: f64,
        cells: usize,
    ) -> Result<GridFunction> {
        let n = self.dim();
        if profiles.len() != n || layout.families() != n {
            return Err(Error::ShapeMismatch(format!("{} profiles for N = {n}", profiles.len())));
        }
        let slack = 1e-12 * (1.0 + layout.l);
        let mut nonzero: Vec<(usize, f64, f64)> = Vec::new();
        for (i, p) in profiles.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let (a, c) = p.support();
            if a < layout.xi_minus[i] - slack || c > layout.xi_plus[i] + slack {
                return Err(Error::ParameterViolation(format!(
                    "profile {i} support [{a}, {c}] leaves [{}, {}]",
                    layout.xi_minus[i], layout.xi_plus[i]
                )));
            }
            if p.max_abs() >= self.s_max() {
                return Err(Error::OutOfDomain { state: vec![p.max_abs()] });
            }
            nonzero.push((i, a, c));
        }
        for (k, &(i, a, c)) in nonzero.iter().enumerate() {
            for &(j, a2, c2) in &nonzero[k + 1..] {
                if a < c2 - slack && a2 < c - slack {
                    return Err(Error::OverlappingSupports(i, j));
                }
            }
        }
        let mut tmp = vec![0.0; n];
        GridFunction::from_fn(x_min, x_max, cells, n, |x, out| {
            out.iter_mut().for_each(|v| *v = 0.0);
            for &(i, _, _) in &nonzero {
                let s = profiles[i].eval(x);
                if s != 0.0 {
                    self.wave_state_into(i, s, &mut tmp);
                    for (o, v) in out.iter_mut().zip(&tmp) {
                        *o += v;
                    }
                }
            }
        })
    }

    /// [`Lab::assemble_phi_on`] over the support hull with the configured cell count.
    pub fn assemble_phi(&self, profiles: &[PiecewiseLinearProfile], layout: &SupportLayout) -> Result<GridFunction> {
        let (lo, hi) = layout.hull();
        self.assemble_phi_on(profiles, layout, lo, hi, self.options.cells)
    }
}
