use nalgebra::DMatrix;

use super::subspace::orthonormalize;
use super::Vector;
use crate::error::{Error, Result};

/// A linear operator `R^in_dim -> R^out_dim`.
///
/// Structured variants are applied without materializing a matrix. Every
/// variant also knows how to apply its adjoint, which is what `Adjoint`
/// dispatches to.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    Dense(DMatrix<f64>),
    Diagonal(Vec<f64>),
    Identity(usize),
    /// `e_i -> e_{i+1}`; the last basis vector is annihilated.
    RightShift(usize),
    /// Orthogonal projector onto the span of an orthonormal basis.
    Projector { dim: usize, basis: Vec<Vector> },
    /// `outer ∘ inner`
    Compose(Box<LinearMap>, Box<LinearMap>),
    Adjoint(Box<LinearMap>),
    /// `Id - alpha * inner` for a square `inner`.
    AxpyForm(f64, Box<LinearMap>),
}

impl LinearMap {
    pub fn dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::EmptyVector);
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(Error::EmptyVector);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::RaggedMatrix {
                    row,
                    expected: ncols,
                    found: r.len(),
                });
            }
            if let Some((index, &value)) = r.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite {
                    index: row * ncols + index,
                    value,
                });
            }
        }
        Ok(Self::Dense(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])))
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        assert!(matrix.nrows() >= 1 && matrix.ncols() >= 1);
        Self::Dense(matrix)
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::Dense(DMatrix::zeros(rows, cols))
    }

    pub fn diagonal(weights: Vec<f64>) -> Result<Self> {
        Vector::new(weights).map(|w| Self::Diagonal(w.into_vec()))
    }

    pub fn identity(dim: usize) -> Self {
        Self::Identity(dim)
    }

    pub fn right_shift(dim: usize) -> Self {
        Self::RightShift(dim)
    }

    /// Projector onto `span(vectors)`; the vectors need not be orthonormal.
    pub fn projector(dim: usize, vectors: &[Vector]) -> Result<Self> {
        for v in vectors {
            v.check_dim(dim, "projector basis")?;
        }
        Ok(Self::Projector {
            dim,
            basis: orthonormalize(vectors),
        })
    }

    /// Projector onto the span of an already orthonormal basis.
    pub(crate) fn projector_orthonormal(dim: usize, basis: Vec<Vector>) -> Self {
        Self::Projector { dim, basis }
    }

    pub fn compose(outer: LinearMap, inner: LinearMap) -> Result<Self> {
        if outer.in_dim() != inner.out_dim() {
            return Err(Error::DimensionMismatch {
                context: "compose",
                expected: outer.in_dim(),
                found: inner.out_dim(),
            });
        }
        Ok(Self::Compose(Box::new(outer), Box::new(inner)))
    }

    pub fn adjoint(inner: LinearMap) -> Self {
        Self::Adjoint(Box::new(inner))
    }

    /// `A* A`
    pub fn gram(a: &LinearMap) -> Self {
        Self::Compose(Box::new(Self::adjoint(a.clone())), Box::new(a.clone()))
    }

    /// `Id - alpha * inner`
    pub fn identity_minus(alpha: f64, inner: LinearMap) -> Result<Self> {
        if inner.in_dim() != inner.out_dim() {
            return Err(Error::DimensionMismatch {
                context: "identity_minus (square operator)",
                expected: inner.in_dim(),
                found: inner.out_dim(),
            });
        }
        Ok(Self::AxpyForm(alpha, Box::new(inner)))
    }

    pub fn in_dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.ncols(),
            Self::Diagonal(w) => w.len(),
            Self::Identity(d) | Self::RightShift(d) => *d,
            Self::Projector { dim, .. } => *dim,
            Self::Compose(_, inner) => inner.in_dim(),
            Self::Adjoint(inner) => inner.out_dim(),
            Self::AxpyForm(_, inner) => inner.in_dim(),
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.nrows(),
            Self::Diagonal(w) => w.len(),
            Self::Identity(d) | Self::RightShift(d) => *d,
            Self::Projector { dim, .. } => *dim,
            Self::Compose(outer, _) => outer.out_dim(),
            Self::Adjoint(inner) => inner.in_dim(),
            Self::AxpyForm(_, inner) => inner.out_dim(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.in_dim() == self.out_dim()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.in_dim(), "apply")?;
        Ok(Vector::from_raw(self.forward(x.as_slice())))
    }

    pub fn apply_adjoint(&self, y: &Vector) -> Result<Vector> {
        y.check_dim(self.out_dim(), "apply_adjoint")?;
        Ok(Vector::from_raw(self.backward(y.as_slice())))
    }

    /// Image of `x`; panics on dimension mismatch. For hot loops whose
    /// dimensions were validated up front.
    pub(crate) fn image(&self, x: &Vector) -> Vector {
        assert_eq!(x.dim(), self.in_dim(), "apply: dimension mismatch");
        Vector::from_raw(self.forward(x.as_slice()))
    }

    /// Adjoint image of `y`; panics on dimension mismatch.
    pub(crate) fn coimage(&self, y: &Vector) -> Vector {
        assert_eq!(y.dim(), self.out_dim(), "apply_adjoint: dimension mismatch");
        Vector::from_raw(self.backward(y.as_slice()))
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Dense(m) => {
                let mut out = vec![0.0; m.nrows()];
                for (j, &xj) in x.iter().enumerate() {
                    if xj == 0.0 {
                        continue;
                    }
                    for (o, a) in out.iter_mut().zip(m.column(j).iter()) {
                        *o += a * xj;
                    }
                }
                out
            }
            Self::Diagonal(w) => w.iter().zip(x).map(|(a, b)| a * b).collect(),
            Self::Identity(_) => x.to_vec(),
            Self::RightShift(d) => {
                let mut out = vec![0.0; *d];
                out[1..].copy_from_slice(&x[..d - 1]);
                out
            }
            Self::Projector { dim, basis } => project_onto(*dim, basis, x),
            Self::Compose(outer, inner) => outer.forward(&inner.forward(x)),
            Self::Adjoint(inner) => inner.backward(x),
            Self::AxpyForm(alpha, inner) => {
                let ix = inner.forward(x);
                x.iter().zip(&ix).map(|(a, b)| a - alpha * b).collect()
            }
        }
    }

    fn backward(&self, y: &[f64]) -> Vec<f64> {
        match self {
            Self::Dense(m) => (0..m.ncols())
                .map(|j| m.column(j).iter().zip(y).map(|(a, b)| a * b).sum())
                .collect(),
            Self::Diagonal(_) | Self::Identity(_) | Self::Projector { .. } => self.forward(y),
            // left shift
            Self::RightShift(d) => {
                let mut out = vec![0.0; *d];
                out[..d - 1].copy_from_slice(&y[1..]);
                out
            }
            Self::Compose(outer, inner) => inner.backward(&outer.backward(y)),
            Self::Adjoint(inner) => inner.forward(y),
            Self::AxpyForm(alpha, inner) => {
                let iy = inner.backward(y);
                y.iter().zip(&iy).map(|(a, b)| a - alpha * b).collect()
            }
        }
    }

    /// Dense matrix of the operator, built column by column.
    pub fn to_dense(&self) -> DMatrix<f64> {
        if let Self::Dense(m) = self {
            return m.clone();
        }
        let n = self.in_dim();
        let mut out = DMatrix::zeros(self.out_dim(), n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.forward(&e);
            out.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        out
    }
}

fn project_onto(dim: usize, basis: &[Vector], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for b in basis {
        let c: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
        for (o, u) in out.iter_mut().zip(b.iter()) {
            *o += c * u;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
        Vector::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    fn random_dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> LinearMap {
        LinearMap::from_matrix(DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn diagonal_action() {
        let d = LinearMap::diagonal(vec![2.0, 3.0]).unwrap();
        assert_eq!(d.apply(&v(&[1.0, 1.0])).unwrap(), v(&[2.0, 3.0]));
    }

    #[test]
    fn right_shift_drops_last_coordinate() {
        let r = LinearMap::right_shift(3);
        assert_eq!(r.apply(&v(&[1.0, 2.0, 3.0])).unwrap(), v(&[0.0, 1.0, 2.0]));
        assert_eq!(r.apply_adjoint(&v(&[1.0, 2.0, 3.0])).unwrap(), v(&[2.0, 3.0, 0.0]));
    }

    #[test]
    fn projector_onto_axis() {
        let p = LinearMap::projector(2, &[v(&[1.0, 0.0])]).unwrap();
        assert_eq!(p.apply(&v(&[3.0, 4.0])).unwrap(), v(&[3.0, 0.0]));
    }

    #[test]
    fn dimension_mismatch_names_both_dims() {
        let a = LinearMap::dense(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let err = a.apply(&v(&[1.0, 2.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                context: "apply",
                expected: 3,
                found: 2
            }
        );
        assert!(err.to_string().contains("expected 3, found 2"));
        assert!(LinearMap::compose(a.clone(), a.clone()).is_err());
        assert!(LinearMap::identity_minus(1.0, a).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(
            LinearMap::dense(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::RaggedMatrix { row: 1, .. })
        ));
    }

    #[test]
    fn linearity_and_adjoint_on_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_dense(&mut rng, 4, 6);
        let maps = vec![
            a.clone(),
            LinearMap::adjoint(a.clone()),
            LinearMap::gram(&a),
            LinearMap::identity_minus(0.3, LinearMap::gram(&a)).unwrap(),
            LinearMap::identity_minus(1.0, LinearMap::right_shift(6)).unwrap(),
            LinearMap::projector(6, &[random_vector(&mut rng, 6), random_vector(&mut rng, 6)])
                .unwrap(),
            LinearMap::compose(a.clone(), LinearMap::right_shift(6)).unwrap(),
            LinearMap::diagonal(vec![1.0, -2.0, 0.5, 0.0, 3.0, 1.0]).unwrap(),
        ];
        for map in &maps {
            for _ in 0..20 {
                let x = random_vector(&mut rng, map.in_dim());
                let z = random_vector(&mut rng, map.in_dim());
                let y = random_vector(&mut rng, map.out_dim());
                let (alpha, beta) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let mut combo = x.scaled(alpha);
                combo.axpy(beta, &z);
                let lhs = map.apply(&combo).unwrap();
                let mut rhs = map.apply(&x).unwrap().scaled(alpha);
                rhs.axpy(beta, &map.apply(&z).unwrap());
                assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + rhs.norm()));

                let left = map.apply(&x).unwrap().dot(&y);
                let right = x.dot(&map.apply_adjoint(&y).unwrap());
                assert!((left - right).abs() <= 1e-12 * (1.0 + left.abs()));

                // (L*)* = L
                let twice = LinearMap::adjoint(LinearMap::adjoint(map.clone()));
                assert!(twice.apply(&x).unwrap().distance(&map.apply(&x).unwrap()) <= 1e-12);
            }
        }
    }

    #[test]
    fn projector_idempotent_and_self_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = LinearMap::projector(
            5,
            &[random_vector(&mut rng, 5), random_vector(&mut rng, 5), random_vector(&mut rng, 5)],
        )
        .unwrap();
        let m = p.to_dense();
        assert!((&m * &m - &m).amax() <= 1e-12);
        assert!((&m - m.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn to_dense_matches_apply() {
        let r = LinearMap::identity_minus(1.0, LinearMap::right_shift(3)).unwrap();
        let m = r.to_dense();
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(m, expected);
    }
}
