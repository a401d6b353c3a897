use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::counting::{binomial_row, log2_big};
use crate::error::{Error, Result};
use crate::wave_lab::{segment_abs_integral, GridFunction};

/// Step function with `values.len()` equal cells starting at `x_min`; zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub x_min: f64,
    pub width: f64,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn x_max(&self) -> f64 {
        self.x_min + self.width * self.values.len() as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.x_min || x >= self.x_max() {
            return 0.0;
        }
        let k = ((x - self.x_min) / self.width).floor() as usize;
        self.values[k.min(self.values.len() - 1)]
    }

    /// Exact `∫|g_k − s|` for the piecewise-linear interpolant of component `k` of `g`.
    ///
    /// Both functions are taken as zero outside their own domains.
    pub fn l1_distance_to(&self, g: &GridFunction, k: usize) -> f64 {
        let mut cuts: Vec<f64> = (0..g.nodes()).map(|j| g.x(j)).collect();
        cuts.extend((0..=self.values.len()).map(|c| self.x_min + c as f64 * self.width));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let tol = 1e-12 * (g.x_max() - g.x_min());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let s = self.eval(0.5 * (a + b));
            let inside = a >= g.x_min() - tol && b <= g.x_max() + tol;
            let (ga, gb) = if inside { (g.eval(a)[k], g.eval(b)[k]) } else { (0.0, 0.0) };
            total += (b - a) * segment_abs_integral(ga - s, gb - s);
        }
        total
    }
}

/// Cover of nondecreasing `v: [0, L] → [0, M]` by quantized monotone step functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCover {
    pub l: f64,
    pub m: f64,
    pub epsilon: f64,
    /// `⌈2LM/ε⌉` cells.
    pub cells: usize,
    /// `⌈LM/ε⌉` levels above zero, spaced `M/levels`.
    pub levels: usize,
}

/// Builds the monotone-class cover; requires `0 < ε < LM/6`.
pub fn monotone_class_cover(l: f64, m: f64, epsilon: f64) -> Result<MonotoneCover> {
    if !(l > 0.0) || !(m > 0.0) || !(epsilon > 0.0) {
        return Err(Error::ParameterViolation(format!("monotone cover needs L, M, eps > 0 (L={l}, M={m}, eps={epsilon})")));
    }
    if epsilon >= l * m / 6.0 {
        return Err(Error::EpsilonTooLarge(format!("eps = {epsilon} >= LM/6 = {}", l * m / 6.0)));
    }
    let lm = l * m / epsilon;
    let cover = MonotoneCover { l, m, epsilon, cells: (2.0 * lm).ceil() as usize, levels: lm.ceil() as usize };
    if cover.size_bits() > cover.bound_bits() {
        return Err(Error::ConstructionBreach(format!(
            "monotone cover has {} bits, bound {}",
            cover.size_bits(),
            cover.bound_bits()
        )));
    }
    Ok(cover)
}

impl MonotoneCover {
    pub fn quantum(&self) -> f64 {
        self.m / self.levels as f64
    }

    /// Number of nondecreasing level sequences, `C(K + J, J)`.
    pub fn size(&self) -> BigUint {
        binomial_row(self.cells + self.levels).swap_remove(self.levels)
    }

    pub fn size_bits(&self) -> f64 {
        log2_big(&self.size())
    }

    /// `4LM/ε`.
    pub fn bound_bits(&self) -> f64 {
        4.0 * self.l * self.m / self.epsilon
    }

    fn step(&self, levels: Vec<usize>) -> StepFunction {
        let q = self.quantum();
        StepFunction {
            x_min: 0.0,
            width: self.l / self.cells as f64,
            values: levels.into_iter().map(|j| j as f64 * q).collect(),
        }
    }

    /// Cover element built from the midpoint values of `v` (a scalar function on `[0, L]`).
    pub fn nearest(&self, v: &GridFunction) -> Result<StepFunction> {
        if v.dim() != 1 {
            return Err(Error::ShapeMismatch(format!("scalar profile expected, got {} components", v.dim())));
        }
        let width = self.l / self.cells as f64;
        let q = self.quantum();
        let levels = (0..self.cells)
            .map(|c| {
                let s = v.eval((c as f64 + 0.5) * width)[0];
                ((s / q).round().max(0.0) as usize).min(self.levels)
            })
            .collect::<Vec<_>>();
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::PreconditionFailed("profile is not nondecreasing".into()));
        }
        Ok(self.step(levels))
    }

    /// Every cover element, in lexicographic order of the level sequences.
    pub fn elements(&self, limit: usize) -> Result<Vec<StepFunction>> {
        if self.size() > BigUint::from(limit) {
            return Err(Error::ParameterViolation(format!("cover has more than {limit} elements")));
        }
        let mut out = Vec::new();
        let mut seq = vec![0usize; self.cells];
        loop {
            out.push(self.step(seq.clone()));
            // Next nondecreasing sequence with entries ≤ levels.
            let Some(p) = (0..self.cells).rev().find(|&p| seq[p] < self.levels) else { break };
            let v = seq[p] + 1;
            seq[p..].iter_mut().for_each(|s| *s = v);
        }
        Ok(out)
    }
}

/// Cover of scalar functions on `[0, ℓ]` vanishing at both ends with total variation `≤ V`.
///
/// Vector data with `N` components, each supported in a window of length `2L_T` and with
/// variation budget `2δ₀`, are handled by concatenating the windows, so `ℓ = 2NL_T`, `V = 2δ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvCover {
    pub families: usize,
    pub l_t: f64,
    pub delta0: f64,
    pub epsilon: f64,
    /// `ℓ = 2NL_T`.
    pub length: f64,
    /// `V = 2δ₀`.
    pub variation: f64,
    /// `⌈2ℓV/ε⌉` cells.
    pub cells: usize,
    /// Value quantum `ε/(2ℓ)`.
    pub quantum: f64,
    /// Largest number of level changes, `⌊2V/q⌋`.
    pub max_changes: usize,
    /// Largest total change in units of `q`, `⌊3V/q⌋`.
    pub max_units: usize,
}

/// Builds the BV cover and checks its size against `2^{48δ₀NL_T/ε}`.
pub fn bv_class_cover(l_t: f64, delta0: f64, families: usize, epsilon: f64) -> Result<BvCover> {
    if !(l_t > 0.0) || !(delta0 > 0.0) || !(epsilon > 0.0) || families == 0 {
        return Err(Error::ParameterViolation(format!(
            "BV cover needs L_T, delta0, eps > 0 and N >= 1 (L_T={l_t}, delta0={delta0}, eps={epsilon}, N={families})"
        )));
    }
    let length = 2.0 * families as f64 * l_t;
    if epsilon >= length * delta0 {
        return Err(Error::EpsilonTooLarge(format!(
            "eps = {epsilon} >= 2 N L_T delta0 = {}; the zero function already covers the class",
            length * delta0
        )));
    }
    let variation = 2.0 * delta0;
    let quantum = epsilon / (2.0 * length);
    let cover = BvCover {
        families,
        l_t,
        delta0,
        epsilon,
        length,
        variation,
        cells: (2.0 * length * variation / epsilon).ceil() as usize,
        quantum,
        max_changes: (2.0 * variation / quantum).floor() as usize,
        max_units: (3.0 * variation / quantum).floor() as usize,
    };
    if cover.size_bits() > cover.bound_bits() {
        return Err(Error::ConstructionBreach(format!("BV cover has {} bits, bound {}", cover.size_bits(), cover.bound_bits())));
    }
    Ok(cover)
}

impl BvCover {
    /// `Σ_{j ≤ J} 2^j C(K, j) C(U, j)`.
    pub fn size(&self) -> BigUint {
        let ck = binomial_row(self.cells);
        let cu = binomial_row(self.max_units);
        let top = self.max_changes.min(self.cells).min(self.max_units);
        let mut total = BigUint::zero();
        let mut pow = BigUint::one();
        for j in 0..=top {
            total += &pow * &ck[j] * &cu[j];
            pow <<= 1;
        }
        total
    }

    pub fn size_bits(&self) -> f64 {
        log2_big(&self.size())
    }

    /// `48δ₀NL_T/ε`.
    pub fn bound_bits(&self) -> f64 {
        48.0 * self.delta0 * self.families as f64 * self.l_t / self.epsilon
    }

    /// Places component `i` of `w`, restricted to `[starts[i], starts[i] + 2L_T]`, on
    /// `[2iL_T, 2(i+1)L_T]`, sampling with spacing `dx`.
    pub fn concatenate(&self, w: &GridFunction, starts: &[f64], dx: f64) -> Result<GridFunction> {
        if w.dim() != self.families || starts.len() != self.families {
            return Err(Error::ShapeMismatch(format!(
                "{} components and {} windows for N = {}",
                w.dim(),
                starts.len(),
                self.families
            )));
        }
        let piece = 2.0 * self.l_t;
        let cells = (self.length / dx).round().max(1.0) as usize;
        GridFunction::from_fn(0.0, self.length, cells, 1, |x, out| {
            let i = ((x / piece).floor() as usize).min(self.families - 1);
            let y = starts[i] + x - i as f64 * piece;
            out[0] = if y < w.x_min() || y > w.x_max() { 0.0 } else { w.eval(y)[i] };
        })
    }

    /// Cover element assigned to a scalar `v` on `[0, ℓ]` by hysteresis quantization of cell midpoints.
    pub fn approximate(&self, v: &GridFunction) -> Result<StepFunction> {
        if v.dim() != 1 {
            return Err(Error::ShapeMismatch(format!("scalar profile expected, got {} components", v.dim())));
        }
        let width = self.length / self.cells as f64;
        let q = self.quantum;
        let mut c = 0i64;
        let (mut changes, mut units) = (0usize, 0usize);
        let mut values = Vec::with_capacity(self.cells);
        for k in 0..self.cells {
            let x = (k as f64 + 0.5) * width;
            let s = if x < v.x_min() || x > v.x_max() { 0.0 } else { v.eval(x)[0] };
            if (s - c as f64 * q).abs() > q {
                let next = (s / q).round() as i64;
                changes += 1;
                units += (next - c).unsigned_abs() as usize;
                c = next;
            }
            values.push(c as f64 * q);
        }
        if changes > self.max_changes || units > self.max_units {
            return Err(Error::PreconditionFailed(format!(
                "{changes} level changes and {units} units exceed the budget ({}, {}); variation too large",
                self.max_changes, self.max_units
            )));
        }
        Ok(StepFunction { x_min: 0.0, width, values })
    }
}
