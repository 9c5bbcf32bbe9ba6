use super::Vector;

/// Orthonormal basis of `span(vectors)` by Gram–Schmidt with a second
/// re-orthogonalization pass. Vectors whose residual falls below the rank
/// cutoff are dropped.
pub fn orthonormalize(vectors: &[Vector]) -> Vec<Vector> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let dim = first.dim();
    let scale = vectors.iter().map(Vector::norm).fold(0.0, f64::max);
    let cutoff = dim.max(vectors.len()) as f64 * f64::EPSILON * scale;

    let mut basis: Vec<Vector> = Vec::with_capacity(vectors.len().min(dim));
    for v in vectors {
        assert_eq!(v.dim(), dim, "orthonormalize: mixed dimensions");
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q);
            }
        }
        let norm = w.norm();
        if norm > cutoff && basis.len() < dim {
            basis.push(w.scaled(1.0 / norm));
        }
    }
    basis
}

fn residual_norm(basis: &[Vector], onto: &[Vector]) -> f64 {
    // spectral norm of (I - P_onto) Q_basis, via the Gram matrix of the residuals
    if basis.is_empty() {
        return 0.0;
    }
    let residuals: Vec<Vector> = basis
        .iter()
        .map(|b| {
            let mut r = b.clone();
            for q in onto {
                let c = q.dot(&r);
                r.axpy(-c, q);
            }
            r
        })
        .collect();
    let k = residuals.len();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| residuals[i].dot(&residuals[j]));
    let top = nalgebra::SymmetricEigen::new(gram).eigenvalues.max().max(0.0);
    top.sqrt()
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal bases. Subspaces of different dimension are at angle π/2.
pub fn subspace_deviation(a: &[Vector], b: &[Vector]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    residual_norm(a, b).max(residual_norm(b, a)).min(1.0)
}
