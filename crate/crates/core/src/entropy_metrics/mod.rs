//! Packing and covering numbers in `L¹`: exact distances, code counting, greedy estimators,
//! constructive covers and closed-form entropy bounds.

mod bounds;
mod counting;
mod covers;
mod ensemble;
mod report;

pub use crate::wave_lab::l1_distance;
pub use bounds::{psi, sawtooth_family_lower_bound, theorem_bounds, BoundKind, FamilyBound, SmallnessWindow, Variant};
pub use counting::{
    ball_count_exact, binomial_row, hamming_ball_volume, hoeffding_ball_bound, log2_big, weighted_ball_count, CountQuery,
};
pub use covers::{bv_class_cover, monotone_class_cover, BvCover, MonotoneCover, StepFunction};
pub use ensemble::{
    certified_packing_bits, code_distance, cube_lexicode_packing, greedy_covering, greedy_packing, tooth_distances, CodeSet,
    FunctionEnsemble, Packing,
};
pub use report::{fit_slope, write_entropy_csv, EntropyReport, ENTROPY_HEADER};
