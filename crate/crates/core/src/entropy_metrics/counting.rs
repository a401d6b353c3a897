use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ball-count query for the sawtooth code cube `{0,1}^{nN}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountQuery {
    pub n: usize,
    pub families: usize,
    pub epsilon: f64,
    pub l: f64,
    pub h: f64,
}

impl CountQuery {
    pub fn new(n: usize, families: usize, epsilon: f64, l: f64, h: f64) -> Result<Self> {
        if n == 0 || families == 0 || !(epsilon >= 0.0) || !(l > 0.0) || !(h > 0.0) {
            return Err(Error::ParameterViolation(format!(
                "invalid count query n={n}, N={families}, eps={epsilon}, L={l}, h={h}"
            )));
        }
        Ok(CountQuery { n, families, epsilon, l, h })
    }

    pub fn bits(&self) -> usize {
        self.n * self.families
    }

    /// `k = ⌊4nε/(Lh)⌋`.
    pub fn k(&self) -> usize {
        (4.0 * self.n as f64 * self.epsilon / (self.l * self.h)).floor() as usize
    }

    /// `μ = nN/2 − k`.
    pub fn mu(&self) -> f64 {
        self.bits() as f64 / 2.0 - self.k() as f64
    }
}

/// `C(n, k)` for all `k ≤ n`.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * BigUint::from(n + 1 - k) / BigUint::from(k);
        row.push(c.clone());
    }
    row
}

/// `Σ_{ℓ ≤ k} C(d, ℓ)`, the Hamming ball volume in `{0,1}^d`.
pub fn hamming_ball_volume(d: usize, k: usize) -> BigUint {
    binomial_row(d).into_iter().take(k.min(d) + 1).fold(BigUint::zero(), |acc, c| acc + c)
}

/// `Σ_{ℓ=0}^{k} C(nN, ℓ)`.
pub fn ball_count_exact(q: &CountQuery) -> BigUint {
    hamming_ball_volume(q.bits(), q.k())
}

/// `log₂` of a positive big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::log2);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

/// `log₂(2^{nN} e^{−2μ²/(nN)})`, the Hoeffding bound on the ball count.
pub fn hoeffding_ball_bound(q: &CountQuery) -> Result<f64> {
    let mu = q.mu();
    if !(mu > 0.0) {
        return Err(Error::HoeffdingInapplicable { mu });
    }
    let d = q.bits() as f64;
    Ok(d - 2.0 * mu * mu / d * std::f64::consts::LOG2_E)
}

/// Number of codes `ι′` with `Σ_i w_i·d_i(ι, ι′) ≤ radius`, where `d_i` counts differing
/// teeth of family `i` (each family has `n` teeth).
pub fn weighted_ball_count(n: usize, weights: &[f64], radius: f64) -> BigUint {
    let row = binomial_row(n);
    let mut prefix = Vec::with_capacity(n + 2);
    prefix.push(BigUint::zero());
    for c in &row {
        let next = prefix.last().unwrap() + c;
        prefix.push(next);
    }
    // Counts with a tiny relative allowance so boundary ties are included.
    let max_teeth = |budget: f64, w: f64| -> Option<usize> {
        if budget < -1e-12 * radius.abs().max(1e-300) {
            return None;
        }
        if w <= 0.0 {
            return Some(n);
        }
        Some(((budget.max(0.0) / w) * (1.0 + 1e-12)).floor().min(n as f64) as usize)
    };
    fn rec(
        i: usize,
        budget: f64,
        n: usize,
        weights: &[f64],
        row: &[BigUint],
        prefix: &[BigUint],
        max_teeth: &dyn Fn(f64, f64) -> Option<usize>,
    ) -> BigUint {
        let last = weights.len() - 1;
        let Some(top) = max_teeth(budget, weights[i]) else { return BigUint::zero() };
        if i == last {
            return prefix[top + 1].clone();
        }
        let mut acc = BigUint::zero();
        for d in 0..=top {
            let sub = rec(i + 1, budget - weights[i] * d as f64, n, weights, row, prefix, max_teeth);
            if sub.is_zero() {
                break;
            }
            acc += &row[d] * sub;
        }
        acc
    }
    if weights.is_empty() {
        return BigUint::one();
    }
    rec(0, radius, n, weights, &row, &prefix, &max_teeth)
}
