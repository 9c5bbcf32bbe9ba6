//! Affine subspaces, affine maps, and fixed-point sets of affine maps.

mod fixed;
mod map;
mod subspace;

pub use fixed::{
    fixed_point_decompose, project_fixed_set, range_complement_check, FixedPointSet,
    RangeComplementReport, DEFAULT_FIXED_POINT_TOL,
};
pub use map::AffineMap;
pub use subspace::AffineSubspace;
pub(crate) use subspace::check_same_dim;
