use serde::{Deserialize, Serialize};

use super::grid::segment_abs_integral;
use crate::error::{Error, Result};

/// Compactly supported continuous piecewise-affine profile `β` with `|β| ≤ d`, `|β′| ≤ b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    pub amplitude_bound: f64,
    pub slope_bound: f64,
}

impl PiecewiseLinearProfile {
    /// Builds a profile; the end values must vanish and the bounds must hold (up to `1e−12` relative).
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, d: f64, b: f64) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.len() < 2 {
            return Err(Error::ShapeMismatch(format!(
                "{} breakpoints and {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ShapeMismatch("breakpoints must be strictly increasing".into()));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::ShapeMismatch("profile must vanish at its end breakpoints".into()));
        }
        let p = PiecewiseLinearProfile { breakpoints, values, amplitude_bound: d, slope_bound: b };
        let tol = 1e-12;
        if p.max_abs() > d * (1.0 + tol) {
            return Err(Error::ParameterViolation(format!("amplitude {} exceeds d = {d}", p.max_abs())));
        }
        if p.max_slope() > b * (1.0 + tol) {
            return Err(Error::ParameterViolation(format!("slope {} exceeds b = {b}", p.max_slope())));
        }
        Ok(p)
    }

    /// The identically zero profile on `[a, b]`.
    pub fn zero(a: f64, b: f64) -> Self {
        PiecewiseLinearProfile { breakpoints: vec![a, b], values: vec![0.0, 0.0], amplitude_bound: 0.0, slope_bound: 0.0 }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        if !(x > bp[0]) || !(x < bp[bp.len() - 1]) {
            return 0.0;
        }
        let k = bp.partition_point(|&b| b <= x) - 1;
        let t = (x - bp[k]) / (bp[k + 1] - bp[k]);
        (1.0 - t) * self.values[k] + t * self.values[k + 1]
    }

    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
    }

    pub fn max_slope(&self) -> f64 {
        self.slopes().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Exact `∫|β|`.
    pub fn l1_norm(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[1] - x[0]) * segment_abs_integral(v[0], v[1]))
            .sum()
    }

    /// `∫β`.
    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Exact `∫|β − γ|` on the merged breakpoint set.
    pub fn l1_distance(&self, other: &PiecewiseLinearProfile) -> f64 {
        let mut xs: Vec<f64> = self.breakpoints.iter().chain(other.breakpoints.iter()).copied().collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.windows(2)
            .map(|w| {
                let a = self.eval(w[0]) - other.eval(w[0]);
                let b = self.eval(w[1]) - other.eval(w[1]);
                (w[1] - w[0]) * segment_abs_integral(a, b)
            })
            .sum()
    }

    /// Shifted copy `x ↦ β(x − shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut p = self.clone();
        p.breakpoints.iter_mut().for_each(|x| *x += shift);
        p
    }

    /// `x ↦ β(−x)`.
    pub fn reflected(&self) -> Self {
        let breakpoints = self.breakpoints.iter().rev().map(|x| -x).collect();
        let values = self.values.iter().rev().copied().collect();
        PiecewiseLinearProfile { breakpoints, values, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }
}

/// Sawtooth profile: `n` teeth of width `L/n` and height `h` on `[ξ⁻, ξ⁻ + L]`;
/// tooth `ℓ` points up when `code[ℓ] = false` and down when `code[ℓ] = true`.
pub fn sawtooth_profile(n: usize, h: f64, l: f64, code: &[bool], xi_minus: f64) -> Result<PiecewiseLinearProfile> {
    if code.len() != n {
        return Err(Error::InvalidCode(format!("code of length {} for n = {n}", code.len())));
    }
    if n < 1 || !(h > 0.0) || !(l > 0.0) {
        return Err(Error::ParameterViolation(format!("sawtooth needs n >= 1, h > 0, L > 0 (n={n}, h={h}, L={l})")));
    }
    let width = l / n as f64;
    let mut xs = Vec::with_capacity(2 * n + 1);
    let mut vs = Vec::with_capacity(2 * n + 1);
    for (k, &down) in code.iter().enumerate() {
        xs.push(xi_minus + k as f64 * width);
        vs.push(0.0);
        xs.push(xi_minus + (k as f64 + 0.5) * width);
        vs.push(if down { -h } else { h });
    }
    xs.push(xi_minus + l);
    vs.push(0.0);
    let slope = 2.0 * h * n as f64 / l;
    Ok(PiecewiseLinearProfile { breakpoints: xs, values: vs, amplitude_bound: h, slope_bound: slope })
}

/// Binary codes selecting one sawtooth per family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveCode {
    pub n: usize,
    pub codes: Vec<Vec<bool>>,
}

impl WaveCode {
    pub fn new(n: usize, codes: Vec<Vec<bool>>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidCode("at least one tooth per family is required".into()));
        }
        if codes.is_empty() || codes.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidCode(format!("every code row must have length {n}")));
        }
        Ok(WaveCode { n, codes })
    }

    pub fn families(&self) -> usize {
        self.codes.len()
    }

    /// Row-major bits: family 0 teeth first.
    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.codes.iter().flatten().copied()
    }

    pub fn hamming(&self, other: &WaveCode) -> Result<usize> {
        if self.n != other.n || self.families() != other.families() {
            return Err(Error::ShapeMismatch(format!(
                "codes of shape {}x{} and {}x{}",
                self.families(),
                self.n,
                other.families(),
                other.n
            )));
        }
        Ok(self.bits().zip(other.bits()).filter(|(a, b)| a != b).count())
    }

    /// Bitstring per family joined by `/`, e.g. `0110/1000`.
    pub fn to_bitstring(&self) -> String {
        self.codes
            .iter()
            .map(|c| c.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let codes: Vec<Vec<bool>> = s
            .split('/')
            .map(|row| {
                row.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::InvalidCode(format!("unexpected character {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n = codes.first().map_or(0, Vec::len);
        WaveCode::new(n, codes)
    }
}

/// Positions `ξ_i^± ` of the family supports: `ξ_i⁻ = −L/2 − λ_i(0)·T`, `ξ_i⁺ = ξ_i⁻ + L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportLayout {
    pub l: f64,
    pub t: f64,
    pub xi_minus: Vec<f64>,
    pub xi_plus: Vec<f64>,
}

impl SupportLayout {
    pub fn new(lambda0: &[f64], l: f64, t: f64) -> Self {
        let xi_minus: Vec<f64> = lambda0.iter().map(|lam| -0.5 * l - lam * t).collect();
        let xi_plus = xi_minus.iter().map(|x| x + l).collect();
        SupportLayout { l, t, xi_minus, xi_plus }
    }

    pub fn families(&self) -> usize {
        self.xi_minus.len()
    }

    /// Supports are pairwise disjoint (up to touching endpoints).
    pub fn disjoint(&self) -> bool {
        let n = self.families();
        (1..n).all(|i| self.xi_plus[i] <= self.xi_minus[i - 1] + 1e-12 * (1.0 + self.l))
    }

    /// Hull `[min ξ⁻, max ξ⁺]`.
    pub fn hull(&self) -> (f64, f64) {
        let lo = self.xi_minus.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.xi_plus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}
