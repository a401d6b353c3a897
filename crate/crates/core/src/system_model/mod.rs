//! Hyperbolic systems, their eigenstructure, rarefaction curves and the constants
//! entering the entropy bounds.

mod constants;
mod eigen;
mod models;
mod rarefaction;

pub use constants::{ball_lattice, compute_constants, compute_constants_with, ConstantsRecord, LatticeOptions, LtKind};
pub use eigen::{compute_gammas, eigen_decompose, eigen_decompose_with, gammas_from, EigenOptions, EigenStructure, Gammas};
pub use models::{
    Burgers, Cubic, FluxModel, ModelName, ModelSpec, PSystem, QuadraticFlux, RiemannChart, ScalarFlux, TempleDiagonal,
};
pub use rarefaction::{rarefaction_curve, rarefaction_curve_batch, RarefactionTable, RAREFACTION_TOL};
