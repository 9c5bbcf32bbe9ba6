//! Concrete problem families: shrinking-angle line pairs, the truncated
//! shift, diagonal operators with decaying weights, and random dense
//! problems.

mod builders;
mod schedule;
mod suite;

pub use builders::{
    alternating_cross_check, build_alternating, build_diagonal, build_friedrichs, build_shift,
    smallest_nonzero_singular_value, AlternatingCrossCheck,
};
pub use schedule::GammaSchedule;
pub use suite::{random_suite, reduced_condition, suite_problem, SuiteOptions, SuiteProblem};
