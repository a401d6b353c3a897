//! Simple-wave laboratory for one-dimensional hyperbolic systems of conservation laws.
//!
//! The crate builds explicit families of classical solutions (superpositions of simple
//! waves with sawtooth profiles), evolves them, and measures packing and covering numbers
//! of the resulting solution sets in `L¹`, comparing them with closed-form `Θ(1/ε)`
//! entropy bounds.

pub mod entropy_metrics;
pub mod error;
pub mod experiment_harness;
pub mod system_model;
pub mod temple_dynamics;
pub mod wave_lab;

pub use error::{Error, Result};
