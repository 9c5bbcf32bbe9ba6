use super::{AffineQuadraticProblem, ProblemKind};
use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::LinearMap;

/// Proximal-gradient operator `T = P_V ∘ (Id − ∇f/β)` as an affine map.
///
/// * constrained least squares: `P_{par V}(Id − A*A/β) x + P_{par V} A*b/β + v₀`
/// * unconstrained least squares: `x − A*(Ax − b)/β`
/// * alternating projections: `P_V P_U`, assembled from the two projectors
/// * quadratic form: `P_{par V}(Id − A/β) x − P_{par V} b/β + v₀`
///
/// When `V` is the whole space the projector is left out, so the
/// constrained formula reduces exactly to the unconstrained one.
pub fn build_prox_grad(problem: &AffineQuadraticProblem) -> Result<AffineMap> {
    let estimate = problem.norm_estimate();
    if problem.kind() != ProblemKind::AlternatingProjections && problem.beta() < estimate.rayleigh - 1e-9 {
        return Err(Error::BetaTooSmall {
            beta: problem.beta(),
            rayleigh: estimate.rayleigh,
        });
    }
    let v = problem.constraint();
    let a = problem.operator();
    let step = 1.0 / problem.beta();

    let (gradient_step, shift) = match problem.kind() {
        ProblemKind::ConstrainedLeastSquares | ProblemKind::UnconstrainedLeastSquares => (
            LinearMap::identity_minus(step, LinearMap::gram(a))?,
            a.coimage(problem.rhs()).scaled(step),
        ),
        ProblemKind::QuadraticForm => (
            LinearMap::identity_minus(step, a.clone())?,
            problem.rhs().scaled(-step),
        ),
        ProblemKind::AlternatingProjections => {
            let u = problem.target().expect("alternating problem stores U");
            let linear = LinearMap::compose(v.parallel_projector(), u.parallel_projector())?;
            // P_V P_U x = P_{par V}(P_{par U} x + u₀) + v₀
            let translation = &v.parallel_projector().image(u.anchor()) + v.anchor();
            return Ok(AffineMap::new(linear, translation)?.flagged_nonexpansive());
        }
    };

    let map = if v.is_whole_space() {
        AffineMap::new(gradient_step, shift)?
    } else {
        let projector = v.parallel_projector();
        let translation = &projector.image(&shift) + v.anchor();
        AffineMap::new(LinearMap::compose(projector, gradient_step)?, translation)?
    };
    Ok(map.flagged_nonexpansive())
}

/// Generic route: the least-squares formula with `A = Id − P_{par U}`,
/// `b = u₀`, `β = 1`. Used to cross-check the alternating-projections form.
pub fn build_prox_grad_least_squares_form(problem: &AffineQuadraticProblem) -> Result<AffineMap> {
    let v = problem.constraint();
    let a = problem.operator();
    let step = 1.0 / problem.beta();
    let gradient_step = LinearMap::identity_minus(step, LinearMap::gram(a))?;
    let shift = a.coimage(problem.rhs()).scaled(step);
    let projector = v.parallel_projector();
    let translation = &projector.image(&shift) + v.anchor();
    Ok(AffineMap::new(LinearMap::compose(projector, gradient_step)?, translation)?.flagged_nonexpansive())
}
