use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, Setup};
use crate::error::Result;
use crate::wave_lab::{forward_bounds, sawtooth_profile, temple_forward_bounds, GridFunction, SupportLayout, WaveCode};

/// A random sawtooth superposition `φ` admissible for forward evolution up to `T`.
pub struct Superposition {
    pub phi: GridFunction,
    pub layout: SupportLayout,
    pub code: WaveCode,
    pub h: f64,
    pub b: f64,
}

/// Draws `teeth` teeth per family at 90% of the forward slope bound.
pub fn sample_superposition(cfg: &ExperimentConfig, s: &Setup, teeth: usize, seed: u64) -> Result<Superposition> {
    let c = &s.constants;
    let fb = match s.model.chart() {
        Some(ch) => temple_forward_bounds(c, ch.d_prime, cfg.l, cfg.t),
        None => forward_bounds(c, cfg.l, cfg.t),
    };
    let b = 0.9 * fb.b_max;
    let h = fb.d_max.min(cfg.big_m).min(cfg.l * b / (2.0 * teeth as f64));
    let layout = SupportLayout::new(&c.lambda0, cfg.l, cfg.t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes: Vec<Vec<bool>> = (0..c.dim).map(|_| (0..teeth).map(|_| rng.gen()).collect()).collect();
    let profiles = codes
        .iter()
        .enumerate()
        .map(|(i, code)| sawtooth_profile(teeth, h, cfg.l, code, layout.xi_minus[i]))
        .collect::<Result<Vec<_>>>()?;
    let phi = s.lab.assemble_phi(&profiles, &layout)?;
    Ok(Superposition { phi, layout, code: WaveCode::new(teeth, codes)?, h, b })
}
