//! Sawtooth profiles, superpositions of simple waves and their evolution.

mod backward;
mod bounds;
mod grid;
mod lab;
mod profile;
mod superposition;

pub use backward::{BackwardChecks, BackwardResult};
pub use bounds::{
    backward_bounds, forward_bounds, temple_backward_bounds, temple_forward_bounds, BackwardBounds, ControlParams,
    ForwardBounds,
};
pub use grid::{l1_distance, GridFunction};
pub(crate) use grid::segment_abs_integral;
pub use lab::{Lab, LabOptions};
pub use profile::{sawtooth_profile, PiecewiseLinearProfile, SupportLayout, WaveCode};
pub use superposition::{grid_sample, DiagnosticSample, EvolutionDiagnostics};

#[cfg(test)]
mod tests;
