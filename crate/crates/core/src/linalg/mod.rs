//! Dense finite-dimensional linear algebra used by every other module.
//!
//! Infinite sequence spaces are modelled by `R^m` with the standard basis.
//! Truncations only illustrate asymptotic statements; no truncation error
//! bound is claimed anywhere.

mod lstsq;
mod map;
mod spectral;
mod subspace;
mod vector;

pub use lstsq::{min_norm_least_squares, min_norm_least_squares_with_scale, rank_cutoff, svd_subspaces, svd_subspaces_with_scale, LeastSquares, SvdSubspaces};
pub use map::LinearMap;
pub use spectral::{
    spectral_norm_sq_upper, spectral_norm_upper, NormEstimate, POWER_ITERATIONS, SAFETY_FACTOR,
};
pub use subspace::{orthonormalize, subspace_deviation};
pub use vector::Vector;
