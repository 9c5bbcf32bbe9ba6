use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{min_norm_least_squares_with_scale, orthonormalize, LinearMap, Vector};

/// Closed affine subspace `anchor + span(basis)`.
///
/// The anchor is the minimum-norm element (`P_V 0`), so it is orthogonal to
/// every basis vector; the basis is orthonormal and spans the parallel
/// subspace `par V = V − anchor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineSubspace {
    anchor: Vector,
    basis: Vec<Vector>,
}

impl AffineSubspace {
    /// Affine subspace through `point` spanned by `directions`, which may be
    /// dependent and need not be normalized.
    pub fn new(point: Vector, directions: &[Vector]) -> Result<Self> {
        for d in directions {
            d.check_dim(point.dim(), "affine subspace direction")?;
        }
        let basis = orthonormalize(directions);
        let anchor = remove_components(&point, &basis);
        Ok(Self { anchor, basis })
    }

    pub fn linear(dim: usize, directions: &[Vector]) -> Result<Self> {
        Self::new(Vector::zeros(dim), directions)
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            anchor: Vector::zeros(dim),
            basis: (0..dim).map(|i| Vector::basis(dim, i)).collect(),
        }
    }

    pub fn point(p: Vector) -> Self {
        Self {
            anchor: p,
            basis: Vec::new(),
        }
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.anchor.dim()
    }

    /// Dimension of the parallel subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    pub fn is_whole_space(&self) -> bool {
        self.basis.len() == self.ambient_dim()
    }

    /// `P_V x = v₀ + Σ ⟨x − v₀, b_i⟩ b_i`
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.ambient_dim(), "project_affine")?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        let offset = x - &self.anchor;
        let mut out = self.anchor.clone();
        for b in &self.basis {
            out.axpy(b.dot(&offset), b);
        }
        out
    }

    /// Projector onto `par V`.
    pub fn parallel_projector(&self) -> LinearMap {
        LinearMap::projector_orthonormal(self.ambient_dim(), self.basis.clone())
    }

    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok(self.project(x)?.distance(x))
    }

    /// Columns are the basis vectors.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        DMatrix::from_fn(n, self.basis.len(), |i, j| self.basis[j][i])
    }

    /// `U ∩ V`, or `None` when the intersection is empty at tolerance `tol`.
    pub fn intersect(&self, other: &AffineSubspace, tol: f64) -> Result<Option<AffineSubspace>> {
        let n = self.ambient_dim();
        other.anchor.check_dim(n, "intersect")?;
        let (k, l) = (self.dim(), other.dim());
        if k + l == 0 {
            let same = self.anchor.distance(&other.anchor) <= tol * (1.0 + self.anchor.norm());
            return Ok(same.then(|| self.clone()));
        }
        // u₀ + B_u α = v₀ + B_v γ  ⇔  [B_u, −B_v] (α, γ) = v₀ − u₀
        let mut system = DMatrix::zeros(n, k + l);
        for (j, b) in self.basis.iter().enumerate() {
            system.column_mut(j).copy_from_slice(b.as_slice());
        }
        for (j, b) in other.basis.iter().enumerate() {
            system.column_mut(k + j).copy_from_slice(b.scaled(-1.0).as_slice());
        }
        let rhs = &other.anchor - &self.anchor;
        let ls = min_norm_least_squares_with_scale(&LinearMap::from_matrix(system), &rhs, 1.0)?;
        if ls.residual > tol * (1.0 + rhs.norm()) {
            return Ok(None);
        }
        let lift = |coeffs: &Vector| {
            let mut p = Vector::zeros(n);
            for (j, b) in self.basis.iter().enumerate() {
                p.axpy(coeffs[j], b);
            }
            p
        };
        let point = &self.anchor + &lift(&ls.particular);
        let directions: Vec<Vector> = ls.kernel_basis.iter().map(lift).collect();
        Ok(Some(AffineSubspace::new(point, &directions)?))
    }
}

fn remove_components(x: &Vector, basis: &[Vector]) -> Vector {
    let mut out = x.clone();
    for b in basis {
        let c = b.dot(&out);
        out.axpy(-c, b);
    }
    out
}

pub(crate) fn check_same_dim(a: &AffineSubspace, b: &AffineSubspace) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "affine subspaces",
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    Ok(())
}
