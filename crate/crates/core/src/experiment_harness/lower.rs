use log::info;

use super::config::{ExperimentConfig, Setup};
use crate::entropy_metrics::{
    certified_packing_bits, greedy_packing, sawtooth_family_lower_bound, theorem_bounds, tooth_distances, BoundKind,
    CodeSet, EntropyReport, FunctionEnsemble, SmallnessWindow, Variant,
};
use crate::error::{Error, Result};
use crate::system_model::ConstantsRecord;
use crate::wave_lab::{forward_bounds, temple_forward_bounds};

/// Families this small are enumerated in full instead of subsampled.
const FULL_CUBE_BITS: usize = 16;

/// Slope bound `b` of the sawtooth family and the forward bounds `(d_max, b_max)` it must respect.
pub fn family_slope(cfg: &ExperimentConfig, s: &Setup) -> Result<(f64, f64, f64)> {
    let c = &s.constants;
    let (l, t) = (cfg.l, cfg.t);
    let nn = c.dim as f64;
    let (b, fb) = match cfg.variant {
        Variant::General => {
            let den = c.cbar3.max(c.cbar4 * nn * nn * l / t).max(c.cbar5 * nn * l / (c.delta0 * t));
            (1.0 / (t * den), forward_bounds(c, l, t))
        }
        Variant::Temple | Variant::Scalar => {
            let den = c.cbar6.max(c.cbar7 * nn * l / t);
            let fb = match s.model.chart() {
                Some(ch) => temple_forward_bounds(c, ch.d_prime, l, t),
                None => forward_bounds(c, l, t),
            };
            (1.0 / (t * den), fb)
        }
    };
    if b > fb.b_max * (1.0 + 1e-9) {
        return Err(Error::ParameterViolation(format!("b = {b} exceeds the forward slope bound {} ({})", fb.b_max, fb.b_binder)));
    }
    Ok((b, fb.d_max, fb.b_max))
}

/// Upper bound used alongside the family bound, with its name.
pub fn matching_upper(cfg: &ExperimentConfig, c: &ConstantsRecord, epsilon: f64) -> (Option<f64>, &'static str) {
    let (kind, record) = match cfg.variant {
        Variant::General => (BoundKind::UpperGeneral, c.clone()),
        Variant::Temple | Variant::Scalar => (BoundKind::UpperTemple, c.with_temple_l_t(cfg.m, c.c_gnl)),
    };
    (theorem_bounds(&record, cfg.l, cfg.t, c.dim, epsilon, kind).ok(), kind.as_str())
}

/// Packing of the sawtooth family at `2ε` against the closed-form lower bound, for each `ε`.
pub fn run_lower_bound_experiment(cfg: &ExperimentConfig) -> Result<Vec<EntropyReport>> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let c = &s.constants;
    let families = c.dim;
    let (b, d_max, _) = family_slope(cfg, &s)?;
    let window = SmallnessWindow { big_m: cfg.big_m, alpha6: c.alpha6 };
    let mut rows = Vec::with_capacity(cfg.epsilons.len());
    for (k, &eps) in cfg.epsilons.iter().enumerate() {
        let fam = sawtooth_family_lower_bound(cfg.l, families, b, eps, cfg.variant, &window)?;
        if fam.h > d_max * (1.0 + 1e-9) {
            return Err(Error::ParameterViolation(format!("h = {} exceeds the amplitude bound {d_max}", fam.h)));
        }
        let radius = 2.0 * eps;
        let td = tooth_distances(&s.lab, fam.n_bar, fam.h, cfg.l);
        let certified = certified_packing_bits(fam.n_bar, &td, radius);
        let d = fam.n_bar * families;
        let (set, subsampled) = if d <= FULL_CUBE_BITS {
            (CodeSet::full_cube(fam.n_bar, families)?, false)
        } else {
            (CodeSet::sample(fam.n_bar, families, cfg.subsample, cfg.seed.wrapping_add(k as u64)), true)
        };
        let packing = greedy_packing(&FunctionEnsemble::weighted(set, td)?, radius);
        let greedy = (packing.count as f64).log2();
        let (upper, upper_name) = matching_upper(cfg, c, eps);
        info!(
            "eps = {eps:.3e}: n = {}, h = {:.3e}, greedy {greedy:.2} bits, certified {certified:.2} bits, bound {:.2} bits",
            fam.n_bar, fam.h, fam.bits
        );
        rows.push(EntropyReport {
            epsilon: eps,
            packing: Some(greedy.max(certified)),
            covering: None,
            lower_bits: Some(fam.bits),
            upper_bits: upper,
            variant: cfg.variant.as_str().to_string(),
            n: Some(fam.n_bar),
            h: Some(fam.h),
            seed: cfg.seed,
            formulas: format!("family_{}+{upper_name}", cfg.variant.as_str()),
            packing_greedy: Some(greedy),
            packing_certified: Some(certified),
            subsampled,
        });
    }
    Ok(rows)
}
