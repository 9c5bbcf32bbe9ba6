use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles or weights `γ₀, γ₁, …` tending to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaSchedule {
    /// `max(floor, start·ratio^k)`
    Geometric {
        start: f64,
        ratio: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor: Option<f64>,
    },
    /// `start/(k+1)`
    Harmonic { start: f64 },
    Explicit { values: Vec<f64> },
}

impl GammaSchedule {
    pub fn friedrichs_default() -> Self {
        GammaSchedule::Geometric {
            start: FRAC_PI_4,
            ratio: 0.8,
            floor: None,
        }
    }

    pub fn diagonal_default() -> Self {
        GammaSchedule::Geometric {
            start: 1.0,
            ratio: 0.8,
            floor: None,
        }
    }

    /// First `m` terms.
    pub fn values(&self, m: usize) -> Result<Vec<f64>> {
        let out: Vec<f64> = match self {
            GammaSchedule::Geometric { start, ratio, floor } => {
                if !(*ratio > 0.0 && *ratio <= 1.0) {
                    return Err(Error::InvalidSchedule(format!("ratio must lie in ]0, 1], got {ratio}")));
                }
                let floor = floor.unwrap_or(0.0);
                (0..m).map(|k| (start * ratio.powi(k as i32)).max(floor)).collect()
            }
            GammaSchedule::Harmonic { start } => (0..m).map(|k| start / (k as f64 + 1.0)).collect(),
            GammaSchedule::Explicit { values } => {
                if values.len() != m {
                    return Err(Error::InvalidSchedule(format!(
                        "explicit schedule has {} values, expected {m}",
                        values.len()
                    )));
                }
                values.clone()
            }
        };
        if let Some((k, g)) = out.iter().enumerate().find(|(_, g)| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidSchedule(format!("value {g} at index {k} is not positive")));
        }
        Ok(out)
    }

    /// Strictly decreasing values inside `]0, π/2[`.
    pub fn angles(&self, m: usize) -> Result<Vec<f64>> {
        let out = self.values(m)?;
        if let Some((k, g)) = out.iter().enumerate().find(|(_, g)| **g >= FRAC_PI_2) {
            return Err(Error::InvalidSchedule(format!("angle {g} at index {k} leaves ]0, pi/2[")));
        }
        if let Some(k) = out.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSchedule(format!("angles must strictly decrease (index {})", k + 1)));
        }
        Ok(out)
    }

    /// Positive, non-increasing weights.
    pub fn weights(&self, m: usize) -> Result<Vec<f64>> {
        let out = self.values(m)?;
        if let Some(k) = out.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidSchedule(format!("weights must not increase (index {})", k + 1)));
        }
        Ok(out)
    }
}
