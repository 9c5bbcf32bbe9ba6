//! Momentum parameter sequences.
//!
//! Every admissible sequence has `t₀ = 1`, `t_n ≥ (n+2)/2` and
//! `t_n² ≥ t_{n+1}² − t_{n+1}`; these imply `t_n ≤ (n+1+√(n+1))/2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LOWER_BOUND_TOL: f64 = 1e-12;
pub const RECURSION_TOL: f64 = 1e-9;
pub const UPPER_BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TCondition {
    InitialValue,
    LowerBound,
    Recursion,
    UpperBound,
}

impl fmt::Display for TCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TCondition::InitialValue => "initial value t_0 = 1",
            TCondition::LowerBound => "lower bound t_n >= (n+2)/2",
            TCondition::Recursion => "recursion t_n^2 >= t_{n+1}^2 - t_{n+1}",
            TCondition::UpperBound => "upper bound t_n <= (n+1+sqrt(n+1))/2",
        })
    }
}

pub fn lower_bound(n: usize) -> f64 {
    (n as f64 + 2.0) / 2.0
}

pub fn upper_bound(n: usize) -> f64 {
    let m = n as f64 + 1.0;
    (m + m.sqrt()) / 2.0
}

/// Largest admissible successor: `(1 + √(1 + 4t²))/2`, pulled down by
/// a few ulps if rounding would break `t² ≥ c² − c`.
pub fn nesterov_step(t: f64) -> f64 {
    let mut c = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
    while c * c - c > t * t {
        c = c.next_down();
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TSequence {
    NesterovRecursive,
    LinearHalf,
    /// A validated prefix; past its end the sequence continues with
    /// [`nesterov_step`].
    CustomExplicit { values: Vec<f64> },
}

impl TSequence {
    pub fn nesterov() -> Self {
        TSequence::NesterovRecursive
    }

    pub fn linear_half() -> Self {
        TSequence::LinearHalf
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        let seq = TSequence::CustomExplicit { values };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TSequence::CustomExplicit { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidTSequence {
                        index: 0,
                        condition: TCondition::InitialValue,
                    });
                }
                if let Some(bad) = values.iter().position(|t| !t.is_finite()) {
                    return Err(Error::NonFinite {
                        index: bad,
                        value: values[bad],
                    });
                }
                match first_violation(values, false) {
                    Some((index, condition)) => Err(Error::InvalidTSequence { index, condition }),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    pub fn iter(&self) -> TIter<'_> {
        TIter {
            seq: self,
            n: 0,
            last: 1.0,
        }
    }

    /// `t₀, …, t_{count−1}`
    pub fn values(&self, count: usize) -> Vec<f64> {
        self.iter().take(count).collect()
    }
}

#[derive(Debug, Clone)]
pub struct TIter<'a> {
    seq: &'a TSequence,
    n: usize,
    last: f64,
}

impl Iterator for TIter<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.n;
        let t = match self.seq {
            _ if n == 0 => 1.0,
            TSequence::LinearHalf => lower_bound(n),
            TSequence::CustomExplicit { values } if n < values.len() => values[n],
            TSequence::NesterovRecursive | TSequence::CustomExplicit { .. } => nesterov_step(self.last),
        };
        self.n += 1;
        self.last = t;
        Some(t)
    }
}

/// First index breaking an admissibility condition. Recursion failures are
/// reported at the smaller index of the offending pair.
pub fn first_violation(values: &[f64], with_upper: bool) -> Option<(usize, TCondition)> {
    if values.first() != Some(&1.0) {
        return Some((0, TCondition::InitialValue));
    }
    for (n, &t) in values.iter().enumerate() {
        if t < lower_bound(n) - LOWER_BOUND_TOL {
            return Some((n, TCondition::LowerBound));
        }
        if with_upper && t > upper_bound(n) + UPPER_BOUND_TOL {
            return Some((n, TCondition::UpperBound));
        }
        if let Some(&next) = values.get(n + 1) {
            if t * t < next * next - next - RECURSION_TOL {
                return Some((n, TCondition::Recursion));
            }
        }
    }
    None
}
