//! Dynamics in Riemann coordinates, a scalar Godunov oracle, and decay estimates.

mod decay;
mod diagonal;
mod godunov;

pub use decay::{linf_from_l1_bound, oleinik_check, support_and_sup_bounds, DecayCertificate, SupportReport};
pub use diagonal::{diagonal_evolve, RiemannState};
pub use godunov::{godunov_flux, godunov_scalar, godunov_snapshots, GODUNOV_CFL};

#[cfg(test)]
mod tests;
