//! Exact finite-n moments: gamma-ratio scalings, conditional-expectation
//! recursions, tree occupancy formulas, and the exhaustive enumeration
//! oracle that arbitrates all of them at small n.

pub mod enumerate;
pub mod gamma;
pub mod occupancy;
pub mod recursion;

pub use enumerate::{
    enumerate_exact, enumerate_tree_moments, ExactLaw, OracleFunctional, TreeMoments,
};
pub use gamma::{gamma_growth, gamma_ratio, log_gamma_ratio, GammaRatioSeq};
pub use occupancy::{expected_delta, expected_delta2, expected_occupancy, occupancy_total};
pub use recursion::{
    mean_negative, mean_positive, mean_profile, recursion_solve, second_moment_innovation,
    var_negative, var_positive, variance_profile, AsymptoticClass, MomentRow, MomentTable,
    RecursionSolution, VarianceRegime,
};
