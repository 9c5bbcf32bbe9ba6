use nalgebra::DMatrix;

use super::{LinearMap, Vector};
use crate::error::Result;

/// Minimum-norm least-squares solution plus an orthonormal kernel basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub particular: Vector,
    pub kernel_basis: Vec<Vector>,
    pub rank: usize,
    /// `‖A·particular − b‖`
    pub residual: f64,
}

/// Orthonormal bases of the fundamental subspaces of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdSubspaces {
    /// Left singular vectors with nonzero singular value: `ran A`.
    pub range: Vec<Vector>,
    /// Right singular vectors with nonzero singular value: `(ker A)^⊥`.
    pub corange: Vec<Vector>,
    pub kernel: Vec<Vector>,
    /// Nonzero singular values, aligned with `range` and `corange`.
    pub singular_values: Vec<f64>,
}

/// Singular values at or below this are treated as zero.
pub fn rank_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

pub fn svd_subspaces(matrix: &DMatrix<f64>) -> SvdSubspaces {
    svd_subspaces_with_scale(matrix, 0.0)
}

/// As [`svd_subspaces`], with the rank cutoff taken relative to
/// `max(σ_max, scale)`. A matrix assembled from an operator of norm `scale`
/// carries round-off of that size even when its own entries are tiny.
pub fn svd_subspaces_with_scale(matrix: &DMatrix<f64>, scale: f64) -> SvdSubspaces {
    let (rows, cols) = matrix.shape();
    let mut out = SvdSubspaces {
        range: Vec::new(),
        corange: Vec::new(),
        kernel: Vec::new(),
        singular_values: Vec::new(),
    };
    if rows == 0 || cols == 0 {
        return out;
    }
    let work = faer::Mat::<f64>::from_fn(rows, cols, |i, j| matrix[(i, j)]);
    let svd = work.svd().expect("SVD of a finite matrix converges");
    let (u, v) = (svd.U(), svd.V());
    let sigma: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = rank_cutoff(rows, cols, sigma_max.max(scale));

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let right = |k: usize| Vector::from_raw((0..cols).map(|i| v[(i, k)]).collect());
    for i in order {
        if sigma[i] > cutoff {
            out.range.push(Vector::from_raw((0..rows).map(|r| u[(r, i)]).collect()));
            out.corange.push(right(i));
            out.singular_values.push(sigma[i]);
        } else {
            out.kernel.push(right(i));
        }
    }
    // V is square, so columns past min(rows, cols) complete the kernel
    for k in sigma.len()..cols {
        out.kernel.push(right(k));
    }
    out
}

/// Minimum-norm minimizer of `‖Az − b‖` and an orthonormal basis of `ker A`.
pub fn min_norm_least_squares(a: &LinearMap, b: &Vector) -> Result<LeastSquares> {
    min_norm_least_squares_with_scale(a, b, 0.0)
}

/// Rank decided against `max(σ_max, scale)`; see [`svd_subspaces_with_scale`].
pub fn min_norm_least_squares_with_scale(a: &LinearMap, b: &Vector, scale: f64) -> Result<LeastSquares> {
    b.check_dim(a.out_dim(), "min_norm_least_squares")?;
    let dense = a.to_dense();
    let parts = svd_subspaces_with_scale(&dense, scale);
    let mut particular = Vector::zeros(a.in_dim());
    for ((u, v), s) in parts.range.iter().zip(&parts.corange).zip(&parts.singular_values) {
        particular.axpy(u.dot(b) / s, v);
    }
    let residual = a.image(&particular).distance(b);
    Ok(LeastSquares {
        particular,
        kernel_basis: parts.kernel,
        rank: parts.singular_values.len(),
        residual,
    })
}
