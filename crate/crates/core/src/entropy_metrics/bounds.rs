use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system_model::{ConstantsRecord, LtKind};

/// Which sawtooth family is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Simple waves of a general strictly hyperbolic system.
    General,
    /// Riemann coordinates of a Temple system.
    Temple,
    /// A single genuinely nonlinear scalar law.
    Scalar,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::General => "general",
            Variant::Temple => "temple",
            Variant::Scalar => "scalar",
        }
    }

    /// `(a, d)` with `n* = N L² b/(a ε)`, `Ψ = (nN/2)(1 − dε/(LhN))²`.
    fn shape(&self) -> (f64, f64) {
        match self {
            Variant::General => (48.0, 8.0),
            Variant::Temple | Variant::Scalar => (24.0, 4.0),
        }
    }

    /// Denominator of the closed form `L²N²b/(K ε)`.
    fn divisor(&self) -> f64 {
        match self {
            Variant::General => 216.0,
            Variant::Temple | Variant::Scalar => 108.0,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Variant::General),
            "temple" => Ok(Variant::Temple),
            "scalar" => Ok(Variant::Scalar),
            other => Err(Error::Config(format!("unknown variant {other:?}"))),
        }
    }
}

/// Quantities entering the smallness condition on `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessWindow {
    /// Amplitude bound `M`.
    pub big_m: f64,
    /// `α₆`; only the general variant uses it.
    pub alpha6: f64,
}

impl SmallnessWindow {
    pub fn unbounded() -> Self {
        SmallnessWindow { big_m: f64::INFINITY, alpha6: 0.0 }
    }
}

/// Closed-form family lower bound together with its optimizing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyBound {
    pub variant: Variant,
    /// `L²N²b/(K ln2 ε)` with `K = 216` (general) or `108`.
    pub bits: f64,
    pub n_bar: usize,
    /// `h_{n̄} = Lb/(2n̄)`.
    pub h: f64,
    /// `Ψ(h_{n̄}, n̄)` in nats.
    pub psi: f64,
    /// Continuous maximizer `n*` of `n ↦ Ψ(Lb/(2n), n)`.
    pub n_star: f64,
}

/// `Ψ(h, n) = (nN/2)(1 − dε/(LhN))²` with `d = 8` (general) or `4`.
pub fn psi(variant: Variant, l: f64, families: usize, epsilon: f64, h: f64, n: f64) -> f64 {
    let (_, d) = variant.shape();
    let nn = families as f64;
    0.5 * n * nn * (1.0 - d * epsilon / (l * h * nn)).powi(2)
}

/// `ε`-entropy lower bound of the sawtooth family of amplitude `≤ M` and slope `≤ b`.
pub fn sawtooth_family_lower_bound(
    l: f64,
    families: usize,
    b: f64,
    epsilon: f64,
    variant: Variant,
    window: &SmallnessWindow,
) -> Result<FamilyBound> {
    if !(l > 0.0) || !(b > 0.0) || !(epsilon > 0.0) || families == 0 {
        return Err(Error::ParameterViolation(format!(
            "family bound needs L, b, eps > 0 and N >= 1 (L={l}, b={b}, eps={epsilon}, N={families})"
        )));
    }
    let nn = families as f64;
    match variant {
        Variant::General => {
            let amp = l * nn * window.big_m / 24.0;
            let geo = if window.alpha6 > 0.0 { l * nn / (48.0 * window.alpha6) } else { f64::INFINITY };
            if epsilon > amp {
                return Err(Error::EpsilonTooLarge(format!("eps = {epsilon} > LNM/24 = {amp}")));
            }
            if epsilon > geo {
                return Err(Error::EpsilonTooLarge(format!("eps = {epsilon} > LN/(48 alpha6) = {geo}")));
            }
        }
        Variant::Temple => {
            let amp = l * nn * window.big_m / 12.0;
            if epsilon > amp {
                return Err(Error::EpsilonTooLarge(format!("eps = {epsilon} > LNM/12 = {amp}")));
            }
        }
        Variant::Scalar => {
            if families != 1 {
                return Err(Error::ParameterViolation(format!("scalar variant with N = {families}")));
            }
            let amp = l * window.big_m / 12.0;
            if epsilon > amp {
                return Err(Error::EpsilonTooLarge(format!("eps = {epsilon} > LM/12 = {amp}")));
            }
        }
    }
    let (a, _) = variant.shape();
    let n_star = nn * l * l * b / (a * epsilon);
    let n_bar = n_star.floor() as usize + 1;
    let h = l * b / (2.0 * n_bar as f64);
    let bits = l * l * nn * nn * b / (variant.divisor() * LN_2 * epsilon);
    Ok(FamilyBound { variant, bits, n_bar, h, psi: psi(variant, l, families, epsilon, h, n_bar as f64), n_star })
}

/// Closed-form bound selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    LowerGeneral,
    UpperGeneral,
    LowerTemple,
    UpperTemple,
    SmallDelta,
    LargeT,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::LowerGeneral => "lower_general",
            BoundKind::UpperGeneral => "upper_general",
            BoundKind::LowerTemple => "lower_temple",
            BoundKind::UpperTemple => "upper_temple",
            BoundKind::SmallDelta => "small_delta",
            BoundKind::LargeT => "large_t",
        }
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

/// Theorem-level entropy bounds in bits.
///
/// `L_T` and `δ₀` are read from the record; the Temple upper bound requires a record whose
/// `L_T` is the Temple radius (see [`ConstantsRecord::with_temple_l_t`]).
pub fn theorem_bounds(
    c: &ConstantsRecord,
    l: f64,
    t: f64,
    families: usize,
    epsilon: f64,
    which: BoundKind,
) -> Result<f64> {
    if !(l > 0.0) || !(t > 0.0) || !(epsilon > 0.0) || families == 0 {
        return Err(Error::ParameterViolation(format!(
            "bounds need L, T, eps > 0 and N >= 1 (L={l}, T={t}, eps={epsilon}, N={families})"
        )));
    }
    let nn = families as f64;
    let d0 = c.delta0;
    let head = (c.c1).min(c.c2 * t / l);
    let bits = match which {
        BoundKind::LowerGeneral => {
            let den = c.c3.max(c.c4 * nn * nn * l / t).max(c.c5 * nn * l / (d0 * t));
            nn * nn * l * l / t * head * head / den / epsilon
        }
        BoundKind::UpperGeneral => 48.0 * nn * d0 * c.l_t / epsilon,
        BoundKind::LowerTemple => {
            let den = c.c6.max(c.c7 * nn * l / t);
            nn * nn * l * l / t / den / epsilon
        }
        BoundKind::UpperTemple => {
            if c.l_t_kind != LtKind::Temple {
                return Err(Error::RegimeMismatch("upper_temple needs the Temple radius as L_T".into()));
            }
            32.0 * nn * nn * c.l_t * c.l_t / (c.c_gnl * t) / epsilon
        }
        BoundKind::SmallDelta => {
            let limit = (ratio(c.c5, c.c3) * nn * l / t).min(ratio(c.c5, c.c4) / l);
            if !(d0 < limit) {
                return Err(Error::RegimeMismatch(format!("small_delta needs delta0 < {limit}, got {d0}")));
            }
            nn * l * d0 * head * head / c.c5 / epsilon
        }
        BoundKind::LargeT => {
            if !(c.c3 > 0.0) {
                return Err(Error::RegimeMismatch("large_t needs c3 > 0".into()));
            }
            let need = (ratio(c.c1, c.c2) * l)
                .max(c.c4 / c.c3 * nn * nn * l)
                .max(c.c5 / c.c3 * nn * l / d0);
            if !(t >= need) {
                return Err(Error::RegimeMismatch(format!("large_t needs T >= {need}, got {t}")));
            }
            nn * nn * l * l / t * c.c1 * c.c1 / c.c3 / epsilon
        }
    };
    Ok(bits)
}
