use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Riemann coordinates `w = W(u)` with the box `Π = [a₁,b₁]×…×[a_N,b_N]`.
#[derive(Clone, Copy)]
pub struct RiemannChart {
    pub to_riemann: fn(&[f64]) -> Vec<f64>,
    pub from_riemann: fn(&[f64]) -> Vec<f64>,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    /// Radius `d̄′` of the coordinate cube `[-d̄′, d̄′]^N` mapped into the state ball.
    pub d_prime: f64,
}

impl fmt::Debug for RiemannChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RiemannChart")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("d_prime", &self.d_prime)
            .finish()
    }
}

impl RiemannChart {
    pub fn contains(&self, w: &[f64]) -> bool {
        w.iter().enumerate().all(|(i, &v)| v >= self.lo[i] - 1e-12 && v <= self.hi[i] + 1e-12)
    }
}

/// A strictly hyperbolic system `u_t + f(u)_x = 0` on a ball `B_d̄ ⊂ R^N`.
///
/// Eigenvalues are sorted increasingly, right eigenvectors are the columns of
/// [`FluxModel::right_eigenvectors`] and left eigenvectors the rows of
/// [`FluxModel::left_eigenvectors`], normalized so that `l_i · r_j = δ_ij`.
pub trait FluxModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn ball_radius(&self) -> f64;

    /// Writes `f(u)` into `out`.
    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()>;

    /// Characteristic matrix `Df(u)` (the quasilinear coefficient for non-conservative models).
    fn jacobian(&self, u: &[f64]) -> DMatrix<f64>;

    fn eigenvalues(&self, u: &[f64]) -> Vec<f64>;

    fn eigenvalue(&self, u: &[f64], i: usize) -> f64 {
        self.eigenvalues(u)[i]
    }

    fn right_eigenvectors(&self, u: &[f64]) -> DMatrix<f64>;

    fn left_eigenvectors(&self, u: &[f64]) -> DMatrix<f64> {
        self.right_eigenvectors(u)
            .try_inverse()
            .expect("eigenvector basis of a strictly hyperbolic system is invertible")
    }

    fn chart(&self) -> Option<RiemannChart> {
        None
    }

    fn is_conservative(&self) -> bool {
        true
    }

    fn contains(&self, u: &[f64]) -> bool {
        norm(u) <= self.ball_radius() * (1.0 + 1e-12)
    }

    /// Scalar flux view for Godunov evolution, when `N = 1`.
    fn as_scalar(&self) -> Option<&dyn ScalarFlux> {
        None
    }
}

/// Scalar flux with the data needed by an exact Riemann solver.
pub trait ScalarFlux: Send + Sync {
    fn f(&self, u: f64) -> f64;
    fn df(&self, u: f64) -> f64;
    /// Points where `f′` vanishes.
    fn critical_points(&self) -> Vec<f64>;
}

pub(crate) fn norm(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct Burgers {
    pub d_bar: f64,
}

impl ScalarFlux for Burgers {
    fn f(&self, u: f64) -> f64 {
        0.5 * u * u
    }
    fn df(&self, u: f64) -> f64 {
        u
    }
    fn critical_points(&self) -> Vec<f64> {
        vec![0.0]
    }
}

impl FluxModel for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }
    fn dim(&self) -> usize {
        1
    }
    fn ball_radius(&self) -> f64 {
        self.d_bar
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = 0.5 * u[0] * u[0];
        Ok(())
    }
    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, u[0])
    }
    fn eigenvalues(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0]]
    }
    fn eigenvalue(&self, u: &[f64], _i: usize) -> f64 {
        u[0]
    }
    fn right_eigenvectors(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }
    fn left_eigenvectors(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }
    fn as_scalar(&self) -> Option<&dyn ScalarFlux> {
        Some(self)
    }
}

/// Non-convex scalar flux `f(u) = u³/3`.
#[derive(Debug, Clone)]
pub struct Cubic {
    pub d_bar: f64,
}

impl ScalarFlux for Cubic {
    fn f(&self, u: f64) -> f64 {
        u * u * u / 3.0
    }
    fn df(&self, u: f64) -> f64 {
        u * u
    }
    fn critical_points(&self) -> Vec<f64> {
        vec![0.0]
    }
}

impl FluxModel for Cubic {
    fn name(&self) -> &str {
        "cubic"
    }
    fn dim(&self) -> usize {
        1
    }
    fn ball_radius(&self) -> f64 {
        self.d_bar
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = u[0] * u[0] * u[0] / 3.0;
        Ok(())
    }
    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, u[0] * u[0])
    }
    fn eigenvalues(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0] * u[0]]
    }
    fn eigenvalue(&self, u: &[f64], _i: usize) -> f64 {
        u[0] * u[0]
    }
    fn right_eigenvectors(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }
    fn left_eigenvectors(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }
    fn as_scalar(&self) -> Option<&dyn ScalarFlux> {
        Some(self)
    }
}

/// p-system `u_t − v_x = 0`, `v_t + p(u)_x = 0` with `p(u) = −u − u²/2`.
///
/// Eigenvalues `∓√(1+u)`; requires `u > −1`.
#[derive(Debug, Clone)]
pub struct PSystem {
    pub d_bar: f64,
}

impl PSystem {
    pub fn pressure(u: f64) -> f64 {
        -u - 0.5 * u * u
    }

    fn sound_speed(u: f64) -> f64 {
        (1.0 + u).sqrt()
    }
}

impl FluxModel for PSystem {
    fn name(&self) -> &str {
        "p_system"
    }
    fn dim(&self) -> usize {
        2
    }
    fn ball_radius(&self) -> f64 {
        self.d_bar
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = -u[1];
        out[1] = Self::pressure(u[0]);
        Ok(())
    }
    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0 - u[0], 0.0])
    }
    fn eigenvalues(&self, u: &[f64]) -> Vec<f64> {
        let c = Self::sound_speed(u[0]);
        vec![-c, c]
    }
    fn eigenvalue(&self, u: &[f64], i: usize) -> f64 {
        let c = Self::sound_speed(u[0]);
        if i == 0 {
            -c
        } else {
            c
        }
    }
    fn right_eigenvectors(&self, u: &[f64]) -> DMatrix<f64> {
        let c = Self::sound_speed(u[0]);
        let s = 1.0 / (1.0 + c * c).sqrt();
        DMatrix::from_column_slice(2, 2, &[s, c * s, s, -c * s])
    }
    fn left_eigenvectors(&self, u: &[f64]) -> DMatrix<f64> {
        let c = Self::sound_speed(u[0]);
        let k = (1.0 + c * c).sqrt() / 2.0;
        DMatrix::from_row_slice(2, 2, &[k, k / c, k, -k / c])
    }
    fn contains(&self, u: &[f64]) -> bool {
        u[0] > -1.0 && norm(u) <= self.d_bar * (1.0 + 1e-12)
    }
}

/// Diagonal 2×2 system in Riemann coordinates:
/// `λ₁ = −1 + w₁ + κw₂`, `λ₂ = 1 + w₂ + κw₁`.
///
/// Only `κ = 0` admits a conservative flux (`f_i = λ_i(0) w_i + w_i²/2`).
#[derive(Debug, Clone)]
pub struct TempleDiagonal {
    pub kappa: f64,
    pub d_bar: f64,
}

pub(crate) const TEMPLE_BASE_SPEEDS: [f64; 2] = [-1.0, 1.0];

fn identity_map(w: &[f64]) -> Vec<f64> {
    w.to_vec()
}

impl TempleDiagonal {
    /// Scalar flux of component `i`, available only in the decoupled case.
    pub fn component_flux(&self, i: usize) -> Result<QuadraticFlux> {
        if self.kappa != 0.0 {
            return Err(Error::NotConservative(format!("temple_diagonal(kappa={})", self.kappa)));
        }
        Ok(QuadraticFlux { speed0: TEMPLE_BASE_SPEEDS[i] })
    }
}

impl FluxModel for TempleDiagonal {
    fn name(&self) -> &str {
        "temple_diagonal"
    }
    fn dim(&self) -> usize {
        2
    }
    fn ball_radius(&self) -> f64 {
        self.d_bar
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        if self.kappa != 0.0 {
            return Err(Error::NotConservative(format!("temple_diagonal(kappa={})", self.kappa)));
        }
        for i in 0..2 {
            out[i] = TEMPLE_BASE_SPEEDS[i] * u[i] + 0.5 * u[i] * u[i];
        }
        Ok(())
    }
    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let l = self.eigenvalues(u);
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(l))
    }
    fn eigenvalues(&self, u: &[f64]) -> Vec<f64> {
        vec![self.eigenvalue(u, 0), self.eigenvalue(u, 1)]
    }
    fn eigenvalue(&self, u: &[f64], i: usize) -> f64 {
        TEMPLE_BASE_SPEEDS[i] + u[i] + self.kappa * u[1 - i]
    }
    fn right_eigenvectors(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }
    fn left_eigenvectors(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }
    fn chart(&self) -> Option<RiemannChart> {
        let d = self.d_bar / 2f64.sqrt();
        Some(RiemannChart {
            to_riemann: identity_map,
            from_riemann: identity_map,
            lo: [-d, -d, 0.0],
            hi: [d, d, 0.0],
            d_prime: d,
        })
    }
    fn is_conservative(&self) -> bool {
        self.kappa == 0.0
    }
}

/// `f(w) = λ₀ w + w²/2`, one component of the decoupled diagonal system.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticFlux {
    pub speed0: f64,
}

impl ScalarFlux for QuadraticFlux {
    fn f(&self, u: f64) -> f64 {
        self.speed0 * u + 0.5 * u * u
    }
    fn df(&self, u: f64) -> f64 {
        self.speed0 + u
    }
    fn critical_points(&self) -> Vec<f64> {
        vec![-self.speed0]
    }
}

/// Catalog entry selecting a built-in model by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Burgers,
    Cubic,
    PSystem,
    TempleDiagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: ModelName,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub ball_radius: Option<f64>,
}

impl ModelSpec {
    pub fn new(name: ModelName) -> Self {
        ModelSpec { name, kappa: None, ball_radius: None }
    }

    pub fn default_ball_radius(name: ModelName) -> f64 {
        match name {
            ModelName::Burgers | ModelName::Cubic => 1.0,
            ModelName::PSystem => 0.5,
            ModelName::TempleDiagonal => 0.2,
        }
    }

    pub fn build(&self) -> Result<Arc<dyn FluxModel>> {
        let d_bar = self.ball_radius.unwrap_or_else(|| Self::default_ball_radius(self.name));
        if !(d_bar > 0.0) {
            return Err(Error::Config(format!("ball_radius must be positive, got {d_bar}")));
        }
        Ok(match self.name {
            ModelName::Burgers => Arc::new(Burgers { d_bar }),
            ModelName::Cubic => Arc::new(Cubic { d_bar }),
            ModelName::PSystem => {
                if d_bar >= 1.0 {
                    return Err(Error::Config("p_system requires ball_radius < 1".into()));
                }
                Arc::new(PSystem { d_bar })
            }
            ModelName::TempleDiagonal => {
                let kappa = self.kappa.unwrap_or(0.0);
                if !(0.0..=0.2).contains(&kappa) {
                    return Err(Error::Config(format!("kappa must lie in [0, 0.2], got {kappa}")));
                }
                Arc::new(TempleDiagonal { kappa, d_bar })
            }
        })
    }
}
