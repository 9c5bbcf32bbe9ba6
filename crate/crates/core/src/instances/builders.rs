use serde::Serialize;

use super::GammaSchedule;
use crate::affine::{fixed_point_decompose, AffineSubspace, DEFAULT_FIXED_POINT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{rank_cutoff, subspace_deviation, svd_subspaces, LinearMap, Vector};
use crate::problem::{build_prox_grad, solve_oracle, AffineQuadraticProblem, Oracle};

/// Two families of lines in `ℝ^{2m}` with shrinking angles.
///
/// Storage is 0-based: `U = span{e₀, e₂, …}` and
/// `V = span{cos γ_k e_{2k} + sin γ_k e_{2k+1}}`. The solution set is `{0}`.
pub fn build_friedrichs(m: usize, schedule: &GammaSchedule) -> Result<AffineQuadraticProblem> {
    if m == 0 {
        return Err(Error::InvalidProblem("friedrichs needs m >= 1".into()));
    }
    let gammas = schedule.angles(m)?;
    let n = 2 * m;
    let u_dirs: Vec<Vector> = (0..m).map(|k| Vector::basis(n, 2 * k)).collect();
    let v_dirs: Vec<Vector> = gammas
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let mut d = Vector::zeros(n);
            d.as_mut_slice()[2 * k] = g.cos();
            d.as_mut_slice()[2 * k + 1] = g.sin();
            d
        })
        .collect();
    AffineQuadraticProblem::alternating_projections(
        AffineSubspace::linear(n, &u_dirs)?,
        AffineSubspace::linear(n, &v_dirs)?,
    )
}

/// `A = Id − R`, `b = 0`, `V = ℝ·e₀`.
pub fn build_shift(m: usize) -> Result<AffineQuadraticProblem> {
    if m < 2 {
        return Err(Error::InvalidProblem("shift needs m >= 2".into()));
    }
    let a = LinearMap::identity_minus(1.0, LinearMap::right_shift(m))?;
    let v = AffineSubspace::linear(m, &[Vector::basis(m, 0)])?;
    AffineQuadraticProblem::constrained_least_squares(a, Vector::zeros(m), v, None)
}

/// `A = Diag(γ)`, `b = 0`, no constraint.
pub fn build_diagonal(m: usize, schedule: &GammaSchedule, beta: Option<f64>) -> Result<AffineQuadraticProblem> {
    if m == 0 {
        return Err(Error::InvalidProblem("diagonal needs m >= 1".into()));
    }
    let a = LinearMap::diagonal(schedule.weights(m)?)?;
    AffineQuadraticProblem::unconstrained_least_squares(a, Vector::zeros(m), beta)
}

/// `f = ½ d_U²`, `g = ι_V`, so that `T = P_V P_U`.
///
/// Fails with [`Error::NoFixedPoint`] when `P_V P_U` has no fixed point.
pub fn build_alternating(u: AffineSubspace, v: AffineSubspace) -> Result<AffineQuadraticProblem> {
    let problem = AffineQuadraticProblem::alternating_projections(u, v)?;
    fixed_point_decompose(&build_prox_grad(&problem)?, DEFAULT_FIXED_POINT_TOL)?;
    Ok(problem)
}

/// How the fixed-point description of the alternating-projections
/// solution set compares with the least-squares oracle and with `U ∩ V`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternatingCrossCheck {
    pub fixed: Oracle,
    /// Sine of the largest principal angle between the two direction spaces.
    pub basis_deviation: f64,
    /// Distance of the fixed-point anchor from the oracle's solution set.
    pub anchor_offset: f64,
    /// Same two numbers against `U ∩ V`, when it is nonempty.
    pub intersection: Option<(f64, f64)>,
}

/// Solution set of an alternating-projections problem read off
/// `Fix(P_V P_U)`, compared against [`solve_oracle`] and `U ∩ V`.
pub fn alternating_cross_check(problem: &AffineQuadraticProblem) -> Result<AlternatingCrossCheck> {
    let u = problem
        .target()
        .ok_or_else(|| Error::InvalidProblem("not an alternating-projections problem".into()))?;
    let fix = fixed_point_decompose(&build_prox_grad(problem)?, DEFAULT_FIXED_POINT_TOL)?;
    let fixed = Oracle {
        mu: problem.smooth_value(&fix.point),
        anchor: fix.point,
        basis: fix.fix_basis,
    };
    let oracle = solve_oracle(problem)?;
    let intersection = u
        .intersect(problem.constraint(), DEFAULT_FIXED_POINT_TOL)?
        .map(|w| -> Result<(f64, f64)> {
            let offset = w.project(&fixed.anchor)?.distance(&fixed.anchor);
            Ok((subspace_deviation(w.basis(), &fixed.basis), offset))
        })
        .transpose()?;
    Ok(AlternatingCrossCheck {
        basis_deviation: subspace_deviation(&oracle.basis, &fixed.basis),
        anchor_offset: oracle.project(&fixed.anchor)?.distance(&fixed.anchor),
        fixed,
        intersection,
    })
}

/// Smallest singular value of `A` on `(ker A)^⊥`, or `None` for the zero map.
pub fn smallest_nonzero_singular_value(a: &LinearMap) -> Option<f64> {
    let parts = svd_subspaces(&a.to_dense());
    let smax = parts.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(a.out_dim(), a.in_dim(), smax);
    parts.singular_values.iter().copied().filter(|s| *s > cutoff).next_back()
}
