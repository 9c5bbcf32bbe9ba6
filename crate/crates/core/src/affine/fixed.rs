//! Fixed-point sets of affine nonexpansive maps.
//!
//! For `T = L + q` with `Fix T ≠ ∅` there is a point `a` with
//! `Fix T = a + Fix L` and `P_{Fix T} x = a + P_{Fix L}(x − a)`. The point
//! picked here is the minimum-norm solution of `(Id − L) a = q`; any other
//! fixed point describes the same set.

use nalgebra::DMatrix;
use serde::Serialize;

use super::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::{min_norm_least_squares_with_scale, subspace_deviation, svd_subspaces_with_scale, LinearMap, Vector};

pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-9;

/// `Fix T = point + span(fix_basis)`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSet {
    pub point: Vector,
    /// Orthonormal basis of `Fix L = ker(Id − L)`.
    pub fix_basis: Vec<Vector>,
    /// `‖(Id − L) point − q‖`
    pub residual: f64,
}

impl FixedPointSet {
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.point.dim(), "project_fixed_set")?;
        let offset = x - &self.point;
        let mut out = self.point.clone();
        for b in &self.fix_basis {
            out.axpy(b.dot(&offset), b);
        }
        Ok(out)
    }
}

/// `Id − L` and the scale its rank is judged against. The entries of `L`
/// carry round-off of order `ε‖L‖_F`, so a singular value of `Id − L` is
/// only counted when it clears `max(n)·ε·(1 + ‖L‖_F)`.
fn identity_minus_dense(linear: &LinearMap) -> (DMatrix<f64>, f64) {
    let n = linear.in_dim();
    let l = linear.to_dense();
    let scale = 1.0 + l.norm();
    (DMatrix::identity(n, n) - l, scale)
}

/// Solve `(Id − L) a = q` in the minimum-norm sense; consistent when the
/// residual is at most `tol·(1 + ‖q‖)`.
pub fn fixed_point_decompose(t: &AffineMap, tol: f64) -> Result<FixedPointSet> {
    let (system, scale) = identity_minus_dense(t.linear());
    let q = t.translation();
    let ls = min_norm_least_squares_with_scale(&LinearMap::from_matrix(system), q, scale)?;
    if ls.residual > tol * (1.0 + q.norm()) {
        return Err(Error::NoFixedPoint {
            residual: ls.residual,
        });
    }
    Ok(FixedPointSet {
        point: ls.particular,
        fix_basis: ls.kernel_basis,
        residual: ls.residual,
    })
}

pub fn project_fixed_set(t: &AffineMap, x: &Vector, tol: f64) -> Result<Vector> {
    x.check_dim(t.dim(), "project_fixed_set")?;
    fixed_point_decompose(t, tol)?.project(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeComplementReport {
    /// `dim (Fix L)^⊥`
    pub fix_complement_dim: usize,
    /// `dim ran(Id − L)`
    pub range_dim: usize,
    /// Sine of the largest principal angle between the two subspaces.
    pub deviation: f64,
}

/// Compare `(Fix L)^⊥` with `ran(Id − L)`; in finite dimension the range is
/// already closed.
pub fn range_complement_check(linear: &LinearMap) -> Result<RangeComplementReport> {
    if !linear.is_square() {
        return Err(Error::DimensionMismatch {
            context: "range_complement_check (square operator)",
            expected: linear.in_dim(),
            found: linear.out_dim(),
        });
    }
    let (system, scale) = identity_minus_dense(linear);
    let parts = svd_subspaces_with_scale(&system, scale);
    // corange of Id − L is (ker(Id − L))^⊥ = (Fix L)^⊥; range is ran(Id − L)
    Ok(RangeComplementReport {
        fix_complement_dim: parts.corange.len(),
        range_dim: parts.range.len(),
        deviation: subspace_deviation(&parts.corange, &parts.range),
    })
}
