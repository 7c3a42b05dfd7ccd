//! Exact exponents of the upper bounds, the main-term constants, and
//! empirical growth fits to compare them against.

mod exponents;
mod fit;
mod gamma;
mod rational;

pub use exponents::{
    applicable_bounds, best_valid_bound, binary_decomposition, exponent_comparison,
    exponent_equal_powers, exponent_equal_powers_with, exponent_main_term, exponent_mixed_powers,
    hua_deficit, hua_deficit_with, main_term_coefficient, paper_inequality_25, preliminary_bound,
    preliminary_exponent, write_comparison_csv, BinaryDecomposition, ComparisonReport, Condition,
    DeficitForm, ExponentBound, Formula, MainTermCoefficient, Validity,
};
pub use fit::{
    empirical_slope, least_squares_loglog, linear_main_term, SlopeFit, MIN_FIT_POINTS, SLOPE_SLACK,
};
pub use gamma::{gamma_fn, ln_gamma};
pub use rational::ExactRational;
