use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::affine::{check_same_dim, AffineSubspace};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm_sq_upper, spectral_norm_upper, LinearMap, NormEstimate, Vector};

/// Seed for the power iteration that estimates the smoothness constant.
pub const POWER_SEED: u64 = 0x5eed;

/// `x` counts as feasible when `dist(x, V) ≤ FEASIBILITY_TOL·(1 + ‖x‖)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

const BETA_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `½‖Ax − b‖²` over an affine `V`.
    ConstrainedLeastSquares,
    /// `½‖Ax − b‖²` over the whole space.
    UnconstrainedLeastSquares,
    /// `½ d_U²` over `V`; the prox-grad operator is `P_V P_U`.
    AlternatingProjections,
    /// `½⟨x, Ax⟩ + ⟨x, b⟩` over `V`, `A` symmetric positive semidefinite.
    QuadraticForm,
}

/// Minimize `F = f + ι_V` for a convex quadratic `f`.
///
/// For the least-squares kinds (alternating projections included, with
/// `A = Id − P_{par U}` and `b = u₀`) `beta` bounds `‖A*A‖`. For the
/// quadratic-form kind the gradient is `Ax + b`, so `beta` bounds `‖A‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineQuadraticProblem {
    kind: ProblemKind,
    operator: LinearMap,
    rhs: Vector,
    constraint: AffineSubspace,
    beta: f64,
    estimate: NormEstimate,
    target: Option<AffineSubspace>,
}

impl AffineQuadraticProblem {
    pub fn constrained_least_squares(
        a: LinearMap,
        b: Vector,
        v: AffineSubspace,
        beta: Option<f64>,
    ) -> Result<Self> {
        Self::least_squares(ProblemKind::ConstrainedLeastSquares, a, b, v, beta)
    }

    pub fn unconstrained_least_squares(a: LinearMap, b: Vector, beta: Option<f64>) -> Result<Self> {
        let v = AffineSubspace::whole_space(a.in_dim());
        Self::least_squares(ProblemKind::UnconstrainedLeastSquares, a, b, v, beta)
    }

    fn least_squares(
        kind: ProblemKind,
        a: LinearMap,
        b: Vector,
        v: AffineSubspace,
        beta: Option<f64>,
    ) -> Result<Self> {
        b.check_dim(a.out_dim(), "right-hand side b")?;
        v.anchor().check_dim(a.in_dim(), "constraint set V")?;
        let estimate = spectral_norm_sq_upper(&a, POWER_SEED);
        if estimate.zero_map {
            return Err(Error::InvalidProblem("A must be nonzero".into()));
        }
        let beta = resolve_beta(beta, &estimate)?;
        Ok(Self {
            kind,
            operator: a,
            rhs: b,
            constraint: v,
            beta,
            estimate,
            target: None,
        })
    }

    /// `f = ½ d_U²`, `g = ι_V`, `β = 1`.
    pub fn alternating_projections(u: AffineSubspace, v: AffineSubspace) -> Result<Self> {
        check_same_dim(&u, &v)?;
        let n = u.ambient_dim();
        let a = LinearMap::identity_minus(1.0, u.parallel_projector())?;
        let estimate = spectral_norm_sq_upper(&a, POWER_SEED);
        Ok(Self {
            kind: ProblemKind::AlternatingProjections,
            operator: a,
            // (Id − P_{par U}) u₀ = u₀ because the anchor is orthogonal to par U
            rhs: u.anchor().clone(),
            constraint: v,
            beta: 1.0,
            estimate: if n > u.dim() {
                estimate
            } else {
                NormEstimate {
                    zero_map: true,
                    ..estimate
                }
            },
            target: Some(u),
        })
    }

    pub fn quadratic_form(
        a: LinearMap,
        b: Vector,
        v: AffineSubspace,
        beta: Option<f64>,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidProblem(format!(
                "quadratic form needs a square A, got {}x{}",
                a.out_dim(),
                a.in_dim()
            )));
        }
        b.check_dim(a.out_dim(), "linear term b")?;
        v.anchor().check_dim(a.in_dim(), "constraint set V")?;
        let dense = a.to_dense();
        let asym = (&dense - dense.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::InvalidProblem(format!(
                "quadratic form matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let min_eig = SymmetricEigen::new(dense).eigenvalues.min();
        if min_eig < -1e-10 {
            return Err(Error::InvalidProblem(format!(
                "quadratic form matrix is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        let estimate = spectral_norm_upper(&a, POWER_SEED);
        if estimate.zero_map {
            return Err(Error::InvalidProblem("A must be nonzero".into()));
        }
        let beta = resolve_beta(beta, &estimate)?;
        Ok(Self {
            kind: ProblemKind::QuadraticForm,
            operator: a,
            rhs: b,
            constraint: v,
            beta,
            estimate,
            target: None,
        })
    }

    /// Same problem with a user-chosen smoothness constant.
    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if self.kind == ProblemKind::AlternatingProjections {
            if beta != 1.0 {
                return Err(Error::InvalidProblem(format!(
                    "alternating projections uses beta = 1, got {beta}"
                )));
            }
            return Ok(self);
        }
        self.beta = resolve_beta(Some(beta), &self.estimate)?;
        Ok(self)
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn operator(&self) -> &LinearMap {
        &self.operator
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    pub fn constraint(&self) -> &AffineSubspace {
        &self.constraint
    }

    /// `U` for the alternating-projections kind.
    pub fn target(&self) -> Option<&AffineSubspace> {
        self.target.as_ref()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Power-iteration estimate backing the smoothness check.
    pub fn norm_estimate(&self) -> NormEstimate {
        self.estimate
    }

    pub fn dim(&self) -> usize {
        self.operator.in_dim()
    }

    /// Smooth part `f`.
    pub fn smooth_value(&self, x: &Vector) -> f64 {
        match self.kind {
            ProblemKind::QuadraticForm => {
                0.5 * x.dot(&self.operator.image(x)) + x.dot(&self.rhs)
            }
            _ => 0.5 * (&self.operator.image(x) - &self.rhs).norm_sq(),
        }
    }

    /// `∇f`
    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim(), "gradient")?;
        Ok(match self.kind {
            ProblemKind::QuadraticForm => &self.operator.image(x) + &self.rhs,
            _ => self.operator.coimage(&(&self.operator.image(x) - &self.rhs)),
        })
    }

    pub fn is_feasible(&self, x: &Vector) -> bool {
        let dist = self.constraint.project_unchecked(x).distance(x);
        dist <= FEASIBILITY_TOL * (1.0 + x.norm())
    }

    /// `F(x) = f(x) + ι_V(x)`; `+∞` off the constraint set.
    pub fn evaluate_objective(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim(), "evaluate_objective")?;
        if !self.is_feasible(x) {
            return Ok(f64::INFINITY);
        }
        Ok(self.smooth_value(x))
    }
}

fn resolve_beta(beta: Option<f64>, estimate: &NormEstimate) -> Result<f64> {
    match beta {
        None => Ok(estimate.upper),
        Some(b) if !b.is_finite() || b <= 0.0 => Err(Error::InvalidProblem(format!(
            "beta must be positive and finite, got {b}"
        ))),
        Some(b) if b < estimate.rayleigh - BETA_SLACK => Err(Error::BetaTooSmall {
            beta: b,
            rayleigh: estimate.rayleigh,
        }),
        Some(b) => Ok(b),
    }
}
