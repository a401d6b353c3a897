use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Setup};
use crate::entropy_metrics::{greedy_covering, theorem_bounds, BoundKind, EntropyReport, FunctionEnsemble};
use crate::error::{Error, Result};
use crate::system_model::{Burgers, Cubic, ModelName, ModelSpec, ScalarFlux, TempleDiagonal};
use crate::temple_dynamics::godunov_snapshots;
use crate::wave_lab::GridFunction;

/// Scalar fluxes of the decoupled components, one per family.
pub fn component_fluxes(cfg: &ExperimentConfig) -> Result<Vec<Box<dyn ScalarFlux>>> {
    let d_bar = cfg.ball_radius.unwrap_or_else(|| ModelSpec::default_ball_radius(cfg.model));
    match cfg.model {
        ModelName::Burgers => Ok(vec![Box::new(Burgers { d_bar })]),
        ModelName::Cubic => Ok(vec![Box::new(Cubic { d_bar })]),
        ModelName::TempleDiagonal => {
            let model = TempleDiagonal { kappa: cfg.kappa.unwrap_or(0.0), d_bar };
            (0..2).map(|i| Ok(Box::new(model.component_flux(i)?) as Box<dyn ScalarFlux>)).collect()
        }
        ModelName::PSystem => {
            Err(Error::Config("the upper-bound experiment needs a scalar model or a decoupled Temple system".into()))
        }
    }
}

/// Random piecewise-linear profile on `[−L, L]` vanishing at both ends, with values in `[−a, a]`.
fn random_profile(rng: &mut ChaCha8Rng, l: f64, a: f64) -> (Vec<f64>, Vec<f64>) {
    let knots = rng.gen_range(1..=8);
    let mut xs: Vec<f64> = (0..knots).map(|_| rng.gen_range(-l..l)).collect();
    xs.sort_by(f64::total_cmp);
    let mut px = vec![-l];
    let mut pv = vec![0.0];
    for x in xs {
        px.push(x);
        pv.push(rng.gen_range(-a..=a));
    }
    px.push(l);
    pv.push(0.0);
    (px, pv)
}

fn interp(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    if x <= xs[0] || x >= xs[xs.len() - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
    let (a, b) = (xs[k - 1], xs[k]);
    if b <= a {
        return vs[k];
    }
    vs[k - 1] + (vs[k] - vs[k - 1]) * (x - a) / (b - a)
}

/// Radius `L_T` of the support window at time `T`.
fn window_radius(cfg: &ExperimentConfig, s: &Setup) -> f64 {
    let c = &s.constants;
    c.temple_radius(cfg.l, cfg.m, cfg.t, c.c_gnl)
}

/// `cfg.samples` random data with support in `[−L, L]`, total mass `≤ m` and amplitude `≤ M`,
/// evolved by Godunov to time `T` on a common grid.
pub fn sample_evolved(cfg: &ExperimentConfig, s: &Setup) -> Result<Vec<GridFunction>> {
    let fluxes = component_fluxes(cfg)?;
    let c = &s.constants;
    let n = fluxes.len();
    let a = match s.model.chart() {
        Some(ch) => cfg.big_m.min(0.99 * ch.d_prime),
        None => cfg.big_m,
    };
    let l_t = window_radius(cfg, s);
    let reach = c.lambda0.iter().map(|v| v.abs()).fold(0.0, f64::max) * cfg.t;
    let half = 1.1 * (l_t + reach);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let profiles: Vec<_> = (0..n).map(|_| random_profile(&mut rng, cfg.l, a)).collect();
        let mut u0 = GridFunction::from_fn(-half, half, cfg.cells, n, |x, o| {
            for (k, (px, pv)) in profiles.iter().enumerate() {
                o[k] = interp(px, pv, x);
            }
        })?;
        let mass = u0.l1_norm();
        if mass > cfg.m {
            let scale = cfg.m / mass;
            u0.data_mut().iter_mut().for_each(|v| *v *= scale);
        }
        let mut data = vec![0.0; u0.data().len()];
        for (k, f) in fluxes.iter().enumerate() {
            let comp = GridFunction::from_data(u0.x_min(), u0.dx(), 1, u0.component(k))?;
            let end = godunov_snapshots(f.as_ref(), &comp, &[cfg.t])?.remove(0);
            for (j, v) in end.data().iter().enumerate() {
                data[j * n + k] = *v;
            }
        }
        out.push(GridFunction::from_data(u0.x_min(), u0.dx(), n, data)?);
    }
    Ok(out)
}

/// Greedy covering of evolved random data against the upper bound, for each `ε`.
pub fn run_upper_bound_experiment(cfg: &ExperimentConfig) -> Result<Vec<EntropyReport>> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let sample = sample_evolved(cfg, &s)?;
    let record = s.constants.with_temple_l_t(cfg.m, s.constants.c_gnl);
    let ensemble = FunctionEnsemble::grid(sample)?;
    let mut rows = Vec::with_capacity(cfg.epsilons.len());
    for &eps in &cfg.epsilons {
        let count = greedy_covering(&ensemble, eps);
        let upper = theorem_bounds(&record, cfg.l, cfg.t, record.dim, eps, BoundKind::UpperTemple)?;
        rows.push(EntropyReport {
            epsilon: eps,
            packing: None,
            covering: (count > 0).then(|| (count as f64).log2()),
            lower_bits: None,
            upper_bits: Some(upper),
            variant: cfg.variant.as_str().to_string(),
            n: None,
            h: None,
            seed: cfg.seed,
            formulas: BoundKind::UpperTemple.as_str().to_string(),
            packing_greedy: None,
            packing_certified: None,
            subsampled: false,
        });
    }
    Ok(rows)
}

/// Per-component coverings at `ε/N` compared with the scalar bound at `ε/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub epsilon: f64,
    pub component_bits: Vec<f64>,
    /// `32L_T²/(cT)·N/ε`.
    pub scalar_bound_bits: f64,
    /// `Σ_i` component bits, the size of the product cover at `ε`.
    pub product_bits: f64,
    pub upper_bits: f64,
    pub holds: bool,
}

pub fn run_product_cover_check(cfg: &ExperimentConfig) -> Result<Vec<ProductCheck>> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let sample = sample_evolved(cfg, &s)?;
    let record = s.constants.with_temple_l_t(cfg.m, s.constants.c_gnl);
    let n = record.dim;
    let comps: Vec<FunctionEnsemble> = (0..n)
        .map(|k| {
            let items = sample
                .iter()
                .map(|g| GridFunction::from_data(g.x_min(), g.dx(), 1, g.component(k)))
                .collect::<Result<Vec<_>>>()?;
            FunctionEnsemble::grid(items)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(cfg.epsilons.len());
    for &eps in &cfg.epsilons {
        let sub = eps / n as f64;
        let component_bits: Vec<f64> =
            comps.iter().map(|e| (greedy_covering(e, sub).max(1) as f64).log2()).collect();
        let scalar_bound_bits = 32.0 * record.l_t * record.l_t / (record.c_gnl * cfg.t) / sub;
        let upper_bits = theorem_bounds(&record, cfg.l, cfg.t, n, eps, BoundKind::UpperTemple)?;
        let product_bits = component_bits.iter().sum();
        let holds = component_bits.iter().all(|&b| b <= scalar_bound_bits) && product_bits <= upper_bits;
        out.push(ProductCheck { epsilon: eps, component_bits, scalar_bound_bits, product_bits, upper_bits, holds });
    }
    Ok(out)
}
