//! Counting natural solutions of `c_1 x_1^k_1 + ... + c_s x_s^k_s = n`.
//!
//! Four independent exact counters ([`count::count_brute_force`],
//! [`count::count_dp`], [`genfunc::residue_count`], [`expsum::fourier_count`])
//! agree on every equation; [`asymptotics`] computes the circle-method
//! upper-bound exponents exactly and fits empirical growth rates to check
//! them against.
//!
//! Data-parallel loops run through [`exec::Exec`]; build without the default
//! `parallel` feature for a purely sequential library.

pub mod asymptotics;
pub mod count;
pub mod equation;
pub mod error;
pub mod exec;
pub mod expsum;
pub mod genfunc;
pub mod sweep;

pub use equation::{CountValue, Equation, EquationClass, EquationTemplate, SolutionDomain, Term};
pub use error::{Error, Result};
pub use exec::{Budget, Exec};
