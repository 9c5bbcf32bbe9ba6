//! Ground truth for the solution set, computed without the iteration.
//!
//! The constraint is parametrized as `x = v₀ + Mz` with `M` the orthonormal
//! basis of `par V`, and the reduced problem is solved by an SVD-based
//! minimum-norm least-squares solve. In finite dimension the reduced
//! least-squares problem always has minimizers, so `S` is never empty for
//! the least-squares kinds.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{AffineQuadraticProblem, ProblemKind};
use crate::error::{Error, Result};
use crate::linalg::{min_norm_least_squares_with_scale, LinearMap, Vector};

/// `S = anchor + span(basis)` and `μ = min F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oracle {
    pub anchor: Vector,
    pub basis: Vec<Vector>,
    pub mu: f64,
}

impl Oracle {
    /// `P_S x₀`
    pub fn project(&self, x0: &Vector) -> Result<Vector> {
        x0.check_dim(self.anchor.dim(), "project_solution_set")?;
        let offset = x0 - &self.anchor;
        let mut out = self.anchor.clone();
        for b in &self.basis {
            out.axpy(b.dot(&offset), b);
        }
        Ok(out)
    }

    /// `anchor + Σ c_i basis_i`
    pub fn point(&self, coefficients: &[f64]) -> Vector {
        let mut out = self.anchor.clone();
        for (c, b) in coefficients.iter().zip(&self.basis) {
            out.axpy(*c, b);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn solve_oracle(problem: &AffineQuadraticProblem) -> Result<Oracle> {
    let v = problem.constraint();
    let n = problem.dim();
    let k = v.dim();
    let a = problem.operator();

    if k == 0 {
        return Ok(Oracle {
            anchor: v.anchor().clone(),
            basis: Vec::new(),
            mu: problem.smooth_value(v.anchor()),
        });
    }

    // rank is judged against the unreduced operator: AM can be numerically
    // zero while A is not
    let scale = operator_scale(problem);
    let a_on_basis: Vec<Vector> = v.basis().iter().map(|b| a.image(b)).collect();
    let a_v0 = a.image(v.anchor());
    let (z, kernel) = match problem.kind() {
        ProblemKind::QuadraticForm => {
            // M^T A M z = −M^T (A v₀ + b)
            let hessian = DMatrix::from_fn(k, k, |i, j| v.basis()[i].dot(&a_on_basis[j]));
            let linear = &a_v0 + problem.rhs();
            let rhs = Vector::from_raw(v.basis().iter().map(|b| -b.dot(&linear)).collect());
            let ls = min_norm_least_squares_with_scale(&LinearMap::from_matrix(hessian), &rhs, scale)?;
            if ls.residual > 1e-9 * (1.0 + rhs.norm()) {
                return Err(Error::Unbounded {
                    residual: ls.residual,
                });
            }
            (ls.particular, ls.kernel_basis)
        }
        _ => {
            let p = a.out_dim();
            let reduced = DMatrix::from_fn(p, k, |i, j| a_on_basis[j][i]);
            let rhs = problem.rhs() - &a_v0;
            let ls = min_norm_least_squares_with_scale(&LinearMap::from_matrix(reduced), &rhs, scale)?;
            (ls.particular, ls.kernel_basis)
        }
    };

    let lift = |coeffs: &Vector| {
        let mut out = Vector::zeros(n);
        for j in 0..k {
            out.axpy(coeffs[j], &v.basis()[j]);
        }
        out
    };
    let anchor = v.anchor() + &lift(&z);
    let basis = kernel.iter().map(lift).collect();
    let mu = problem.smooth_value(&anchor);
    Ok(Oracle { anchor, basis, mu })
}

/// Upper estimate of `‖A‖`, or of `‖A‖` as a Hessian for quadratic forms.
pub fn operator_scale(problem: &AffineQuadraticProblem) -> f64 {
    let upper = problem.norm_estimate().upper;
    match problem.kind() {
        ProblemKind::QuadraticForm => upper,
        _ => upper.sqrt(),
    }
}

/// `F(x) − μ` evaluated in a cancellation-free form.
///
/// For feasible `x` and any `s ∈ S`, `x − s ∈ par V` and the optimality of
/// `s` kills the linear term, leaving `½‖A(x − s)‖²` (least-squares kinds)
/// or `½⟨x − s, A(x − s)⟩` (quadratic form). Infeasible points give `+∞`.
pub fn objective_gap(problem: &AffineQuadraticProblem, oracle: &Oracle, x: &Vector) -> f64 {
    if !problem.is_feasible(x) {
        return f64::INFINITY;
    }
    let d = x - &oracle.anchor;
    let ad = problem.operator().image(&d);
    match problem.kind() {
        ProblemKind::QuadraticForm => 0.5 * d.dot(&ad),
        _ => 0.5 * ad.norm_sq(),
    }
}
