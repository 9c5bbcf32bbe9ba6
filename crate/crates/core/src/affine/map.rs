use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{LinearMap, Vector};

/// `T x = L x + q` with a square linear part.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: LinearMap,
    translation: Vector,
    nonexpansive: bool,
}

impl AffineMap {
    pub fn new(linear: LinearMap, translation: Vector) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::DimensionMismatch {
                context: "affine map (square linear part)",
                expected: linear.in_dim(),
                found: linear.out_dim(),
            });
        }
        translation.check_dim(linear.out_dim(), "affine map translation")?;
        Ok(Self {
            linear,
            translation,
            nonexpansive: false,
        })
    }

    /// Linear map with zero translation.
    pub fn linear_only(linear: LinearMap) -> Result<Self> {
        let n = linear.out_dim();
        Self::new(linear, Vector::zeros(n))
    }

    pub fn flagged_nonexpansive(mut self) -> Self {
        self.nonexpansive = true;
        self
    }

    pub fn is_nonexpansive(&self) -> bool {
        self.nonexpansive
    }

    pub fn linear(&self) -> &LinearMap {
        &self.linear
    }

    pub fn translation(&self) -> &Vector {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim(), "affine map")?;
        Ok(self.eval(x))
    }

    /// Unchecked evaluation; every caller goes through this one expression.
    pub(crate) fn eval(&self, x: &Vector) -> Vector {
        let mut out = self.linear.image(x);
        for (o, q) in out.as_mut_slice().iter_mut().zip(self.translation.iter()) {
            *o += q;
        }
        out
    }

    /// The same linear part with the translation dropped.
    pub fn linear_part(&self) -> AffineMap {
        AffineMap {
            linear: self.linear.clone(),
            translation: Vector::zeros(self.dim()),
            nonexpansive: self.nonexpansive,
        }
    }

    /// Largest observed `‖Tx − Ty‖ / ‖x − y‖` over random pairs.
    pub fn lipschitz_probe(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        let mut worst = 0.0_f64;
        for _ in 0..pairs {
            let scale = 10f64.powf(rng.random_range(-2.0..2.0));
            let x = Vector::from_raw((0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect());
            let y = Vector::from_raw((0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect());
            let d = x.distance(&y);
            if d > 0.0 {
                worst = worst.max(self.eval(&x).distance(&self.eval(&y)) / d);
            }
        }
        worst
    }
}
