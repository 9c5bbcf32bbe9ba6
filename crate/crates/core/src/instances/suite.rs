//! Seeded random dense problems with controlled conditioning.
//!
//! The condition number of a problem is `λ_max(G) / λ_min⁺(MᵀGM)` where `G`
//! is the curvature of `f` (`A*A`, or `A` for quadratic forms), `M` a basis
//! of `par V` and `λ_min⁺` the smallest eigenvalue above the rank cutoff.
//! This is the ratio that governs the iteration inside `V`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::affine::AffineSubspace;
use crate::error::{Error, Result};
use crate::linalg::{rank_cutoff, svd_subspaces, svd_subspaces_with_scale, LinearMap, Vector};
use crate::problem::{AffineQuadraticProblem, ProblemKind};

const MAX_ATTEMPTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub count: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub max_codim: usize,
    pub max_condition: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            count: 24,
            min_dim: 2,
            max_dim: 50,
            max_codim: 3,
            max_condition: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteProblem {
    pub label: String,
    pub problem: AffineQuadraticProblem,
    pub x0: Vector,
    pub condition: f64,
    pub rank_deficient: bool,
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_raw((0..n).map(|_| rng.sample(StandardNormal)).collect())
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// `rows × cols` with orthonormal columns, `cols ≤ rows`.
fn orthonormal_columns(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, rows, cols).qr().q()
}

fn columns(m: &DMatrix<f64>) -> Vec<Vector> {
    m.column_iter().map(|c| Vector::from_raw(c.iter().copied().collect())).collect()
}

fn random_affine(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Result<AffineSubspace> {
    let dirs = columns(&orthonormal_columns(rng, n, dim));
    AffineSubspace::new(gaussian_vector(rng, n), &dirs)
}

/// `levels` values from 1 down to `1/spread`, log-spaced.
fn log_spaced(levels: usize, spread: f64) -> Vec<f64> {
    if levels == 1 {
        return vec![1.0];
    }
    (0..levels)
        .map(|j| spread.powf(-(j as f64) / (levels as f64 - 1.0)))
        .collect()
}

/// Condition number as defined in the module docs; 1 when `V` is a point
/// or `f` is constant on `V`.
pub fn reduced_condition(problem: &AffineQuadraticProblem) -> f64 {
    let a = problem.operator().to_dense();
    let v = problem.constraint();
    let m = if v.is_whole_space() {
        DMatrix::identity(problem.dim(), problem.dim())
    } else {
        v.basis_matrix()
    };
    if m.ncols() == 0 {
        return 1.0;
    }
    match problem.kind() {
        ProblemKind::QuadraticForm => {
            let top = SymmetricEigen::new(a.clone()).eigenvalues.max();
            let reduced = m.transpose() * &a * &m;
            let eig = SymmetricEigen::new(reduced).eigenvalues;
            let cutoff = rank_cutoff(eig.len(), eig.len(), eig.max().max(top));
            let low = eig.iter().copied().filter(|e| *e > cutoff).fold(f64::INFINITY, f64::min);
            if low.is_finite() {
                top / low
            } else {
                1.0
            }
        }
        _ => {
            let top = svd_subspaces(&a).singular_values.first().copied().unwrap_or(0.0);
            let reduced = svd_subspaces_with_scale(&(&a * &m), top);
            match reduced.singular_values.last() {
                Some(low) => (top / low).powi(2),
                None => 1.0,
            }
        }
    }
}

fn least_squares_candidate(
    rng: &mut ChaCha8Rng,
    n: usize,
    codim: usize,
    deficient: bool,
    target: f64,
) -> Result<AffineQuadraticProblem> {
    let rows = (n as i64 + rng.random_range(-(n as i64) / 2..=(n as i64) / 2)).max(1) as usize;
    let full = rows.min(n);
    let rank = if deficient && full > 1 {
        rng.random_range((full / 2).max(1)..full)
    } else {
        full
    };
    let sigma = log_spaced(rank, target.sqrt());
    let scale = 10f64.powf(rng.random_range(-0.3..0.3));
    let left = orthonormal_columns(rng, rows, rank);
    let right = orthonormal_columns(rng, n, rank);
    let a = &left * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sigma)) * right.transpose() * scale;
    let a = LinearMap::from_matrix(a);
    let z = gaussian_vector(rng, n);
    let mut b = a.image(&z);
    b.axpy(0.1, &gaussian_vector(rng, rows));
    if codim == 0 {
        AffineQuadraticProblem::unconstrained_least_squares(a, b, None)
    } else {
        let v = random_affine(rng, n, n - codim)?;
        AffineQuadraticProblem::constrained_least_squares(a, b, v, None)
    }
}

fn quadratic_form_candidate(
    rng: &mut ChaCha8Rng,
    n: usize,
    codim: usize,
    deficient: bool,
    target: f64,
) -> Result<AffineQuadraticProblem> {
    let rank = if deficient && n > 1 {
        rng.random_range((n / 2).max(1)..n)
    } else {
        n
    };
    let mut lambda = log_spaced(rank, target);
    lambda.resize(n, 0.0);
    let q = orthonormal_columns(rng, n, n);
    let dense = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda)) * q.transpose();
    let dense = (&dense + dense.transpose()) * 0.5;
    let a = LinearMap::from_matrix(dense);
    let v = if codim == 0 {
        AffineSubspace::whole_space(n)
    } else {
        random_affine(rng, n, n - codim)?
    };
    // b ∈ −ran A + (par V)^⊥ keeps F bounded below on V
    let mut b = a.image(&gaussian_vector(rng, n)).scaled(-1.0);
    let xi = gaussian_vector(rng, n);
    let along = v.parallel_projector().image(&xi);
    b.axpy(0.1, &(&xi - &along));
    AffineQuadraticProblem::quadratic_form(a, b, v, None)
}

fn alternating_candidate(rng: &mut ChaCha8Rng, n: usize, codim: usize) -> Result<AffineQuadraticProblem> {
    let u_dim = rng.random_range(1..=n.saturating_sub(1).max(1));
    let u = random_affine(rng, n, u_dim)?;
    let v = if codim == 0 {
        AffineSubspace::whole_space(n)
    } else {
        random_affine(rng, n, n - codim)?
    };
    AffineQuadraticProblem::alternating_projections(u, v)
}

fn spaced(i: usize, count: usize, low: f64, high: f64) -> f64 {
    if count <= 1 {
        return low;
    }
    low * (high / low).powf(i as f64 / (count as f64 - 1.0))
}

/// Problem `i` of the suite seeded by `seed`; independent of the others.
///
/// Dimensions and target condition numbers are log-spaced over the
/// requested ranges, the target running in the opposite direction to the
/// dimension. A draw is kept when its condition number lies in
/// `[target/4, max_condition]`; alternating-projection draws only need the
/// upper bound.
pub fn suite_problem(seed: u64, i: usize, opts: &SuiteOptions) -> Result<SuiteProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64));
    let n = (spaced(i, opts.count, opts.min_dim as f64, opts.max_dim as f64).round() as usize)
        .clamp(opts.min_dim, opts.max_dim);
    let codim = (i % (opts.max_codim + 1)).min(n - 1);
    let deficient = i % 3 == 2;
    // odd indices walk the targets backwards so both ends meet every size
    let j = if i.is_multiple_of(2) { i } else { opts.count - 1 - i };
    let target = spaced(j, opts.count, 1.0, opts.max_condition);
    for _ in 0..MAX_ATTEMPTS {
        let (label, problem) = match i % 10 {
            3 | 8 => ("quadratic_form", quadratic_form_candidate(&mut rng, n, codim, deficient, target)?),
            9 => ("alternating", alternating_candidate(&mut rng, n, codim)?),
            _ => ("least_squares", least_squares_candidate(&mut rng, n, codim, deficient, target)?),
        };
        let condition = reduced_condition(&problem);
        let floor = if label == "alternating" { 0.0 } else { target / 4.0 };
        if condition <= opts.max_condition && condition >= floor {
            let x0 = gaussian_vector(&mut rng, n);
            return Ok(SuiteProblem {
                label: format!("{i:02}-{label}-n{n}-codim{codim}"),
                problem,
                x0,
                condition,
                rank_deficient: deficient,
            });
        }
    }
    Err(Error::InvalidProblem(format!(
        "no problem with condition in [{}, {}] after {MAX_ATTEMPTS} draws (index {i})",
        target / 4.0,
        opts.max_condition
    )))
}

pub fn random_suite(seed: u64, opts: &SuiteOptions) -> Result<Vec<SuiteProblem>> {
    (0..opts.count).map(|i| suite_problem(seed, i, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_covers_requested_ranges() {
        let opts = SuiteOptions::default();
        let suite = random_suite(7, &opts).unwrap();
        assert_eq!(suite.len(), opts.count);
        assert_eq!(suite.first().unwrap().problem.dim(), 2);
        assert_eq!(suite.last().unwrap().problem.dim(), 50);
        for s in &suite {
            assert!(s.condition >= 1.0 - 1e-9 && s.condition <= 1e3, "{}", s.label);
            assert!(s.problem.constraint().codim() <= 3);
        }
        assert!(suite.iter().any(|s| s.problem.constraint().codim() == 3));
        assert!(suite.iter().any(|s| s.condition > 500.0));
        assert!(suite.iter().any(|s| s.condition < 2.0));
        assert!(suite.iter().any(|s| s.rank_deficient));
        assert!(suite.iter().any(|s| s.problem.kind() == ProblemKind::QuadraticForm));
    }

    #[test]
    fn suite_is_deterministic() {
        let opts = SuiteOptions {
            count: 6,
            ..SuiteOptions::default()
        };
        assert_eq!(random_suite(3, &opts).unwrap(), random_suite(3, &opts).unwrap());
        assert_ne!(random_suite(3, &opts).unwrap(), random_suite(4, &opts).unwrap());
    }

    #[test]
    fn diagonal_condition_is_squared_spread() {
        let p = AffineQuadraticProblem::unconstrained_least_squares(
            LinearMap::diagonal(vec![1.0, 0.1]).unwrap(),
            Vector::zeros(2),
            None,
        )
        .unwrap();
        assert!((reduced_condition(&p) - 100.0).abs() <= 1e-9);
    }
}
