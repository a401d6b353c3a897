//! Experiment configs, the verification pipelines and their CSV/JSON output.

mod config;
mod generate;
mod lower;
mod report;
mod roundtrip;
mod upper;

pub use config::{ExperimentConfig, Setup};
pub use generate::{sample_superposition, Superposition};
pub use lower::{family_slope, matching_upper, run_lower_bound_experiment};
pub use report::{loglog_slope, report, slopes, Slopes};
pub use roundtrip::{run_roundtrip_experiment, RoundtripCase, RoundtripReport};
pub use upper::{component_fluxes, run_product_cover_check, run_upper_bound_experiment, sample_evolved, ProductCheck};

#[cfg(test)]
mod tests;
