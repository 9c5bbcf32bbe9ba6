//! Power iteration for `‖A*A‖`.
//!
//! Power iteration approaches the top eigenvalue from below, so the
//! returned bound is the best Rayleigh quotient seen, inflated by
//! [`SAFETY_FACTOR`]. Overshooting only makes the gradient step shorter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{LinearMap, Vector};

pub const SAFETY_FACTOR: f64 = 1.01;
pub const POWER_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    /// Safety-inflated upper estimate.
    pub upper: f64,
    /// Largest Rayleigh quotient observed; a lower bound on the true norm.
    pub rayleigh: f64,
    /// Set when the operator annihilated the probe: the map is zero.
    pub zero_map: bool,
}

/// Upper estimate of `‖A*A‖` from power iteration on `A*A`.
pub fn spectral_norm_sq_upper(map: &LinearMap, seed: u64) -> NormEstimate {
    let n = map.in_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vector::from_raw((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    let norm = v.norm();
    v = v.scaled(1.0 / norm);

    let mut best = 0.0_f64;
    for _ in 0..POWER_ITERATIONS {
        let av = map.image(&v);
        let w = map.coimage(&av);
        // <v, A*A v> = ‖Av‖² is the Rayleigh quotient of a unit v
        best = best.max(av.norm_sq());
        let wn = w.norm();
        if wn == 0.0 || !wn.is_finite() {
            break;
        }
        v = w.scaled(1.0 / wn);
    }
    if best == 0.0 {
        log::warn!("spectral estimate: operator is zero; a nonzero A is required");
    }
    NormEstimate {
        upper: SAFETY_FACTOR * best,
        rayleigh: best,
        zero_map: best == 0.0,
    }
}

/// Upper estimate of `‖A‖`, i.e. the square root of the `A*A` estimate.
pub fn spectral_norm_upper(map: &LinearMap, seed: u64) -> NormEstimate {
    let sq = spectral_norm_sq_upper(map, seed);
    let rayleigh = sq.rayleigh.sqrt();
    NormEstimate {
        upper: SAFETY_FACTOR * rayleigh,
        rayleigh,
        zero_map: sq.zero_map,
    }
}
