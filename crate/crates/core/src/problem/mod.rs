//! Affinely constrained convex quadratic problems, their proximal-gradient
//! operators, and an independent oracle for the solution set.

mod model;
mod operator;
mod oracle;

pub use model::{AffineQuadraticProblem, ProblemKind, FEASIBILITY_TOL, POWER_SEED};
pub use operator::{build_prox_grad, build_prox_grad_least_squares_form};
pub use oracle::{objective_gap, operator_scale, solve_oracle, Oracle};
