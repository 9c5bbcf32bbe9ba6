//! Post-hoc certification of a [`SolveTrace`]. Every check is a pure
//! function of its inputs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fista::{first_violation, SolveTrace, TCondition, TSequence, TraceRecord};
use crate::linalg::Vector;

pub const RATE_SLACK: f64 = 1e-6;
pub const MONOTONE_SLACK: f64 = 1e-12;
pub const FEJER_SLACK: f64 = 1e-8;
pub const WINDOW_FRACTION: f64 = 0.1;
/// Residuals below `ROUNDOFF_FACTOR · ε · (1 + max ‖x_n‖)` are round-off.
pub const ROUNDOFF_FACTOR: f64 = 1e3;

fn window(len: usize) -> usize {
    ((len as f64 * WINDOW_FRACTION).ceil() as usize).max(1).min(len)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCertificate {
    /// `sup_{n ≥ 1} (n+1)²·(F(x_n) − μ)`
    pub sup_scaled_gap: f64,
    /// `2β‖x₀ − P_S x₀‖²`
    pub bound_constant: f64,
    pub passed: bool,
    pub worst_index: usize,
}

pub fn certify_rate(trace: &SolveTrace, beta: f64) -> Result<RateCertificate> {
    let psx0 = trace.psx0.as_ref().ok_or(Error::MissingOracleData)?;
    let bound_constant = 2.0 * beta * trace.x0.distance(psx0).powi(2);
    let mut sup_scaled_gap = 0.0;
    let mut worst_index = 0;
    for r in trace.records.iter().skip(1) {
        let gap = r.objective_gap.ok_or(Error::MissingOracleData)?;
        let scaled = (r.n as f64 + 1.0).powi(2) * gap;
        if scaled > sup_scaled_gap || scaled.is_nan() {
            sup_scaled_gap = scaled;
            worst_index = r.n;
        }
    }
    Ok(RateCertificate {
        sup_scaled_gap,
        bound_constant,
        passed: sup_scaled_gap <= bound_constant * (1.0 + RATE_SLACK),
        worst_index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongConvergenceReport {
    pub tol: f64,
    pub final_dist_x: f64,
    pub final_dist_y: f64,
    pub passed: bool,
    /// First `n` with `‖x_n − P_S x₀‖ ≤ tol`.
    pub first_index: Option<usize>,
    /// Share of steps in the final window where `‖x_n − P_S x₀‖` did not grow.
    pub tail_monotone_fraction: f64,
    pub limit: Vector,
}

pub fn certify_strong_convergence(trace: &SolveTrace, tol: f64) -> Result<StrongConvergenceReport> {
    let limit = trace.psx0.clone().ok_or(Error::MissingOracleData)?;
    let dist_x: Vec<f64> = trace
        .records
        .iter()
        .map(|r| r.dist_x.ok_or(Error::MissingOracleData))
        .collect::<Result<_>>()?;
    let last = trace.last();
    let final_dist_x = dist_x[dist_x.len() - 1];
    let final_dist_y = last.dist_y.ok_or(Error::MissingOracleData)?;

    let tail = &dist_x[dist_x.len() - window(dist_x.len())..];
    let steps = tail.len().saturating_sub(1);
    let tail_monotone_fraction = if steps == 0 {
        1.0
    } else {
        tail.windows(2).filter(|w| w[1] <= w[0] + MONOTONE_SLACK).count() as f64 / steps as f64
    };

    Ok(StrongConvergenceReport {
        tol,
        final_dist_x,
        final_dist_y,
        passed: final_dist_x <= tol && final_dist_y <= tol,
        first_index: dist_x.iter().position(|d| *d <= tol),
        tail_monotone_fraction,
        limit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TAsymptoticsReport {
    pub horizon: usize,
    pub violation: Option<(usize, TCondition)>,
    /// `max |(t_n − 1)/t_{n+1} − 1|` over the final window of indices.
    pub tail_ratio_deviation: f64,
    pub passed: bool,
}

pub fn check_t_asymptotics(ts: &TSequence, horizon: usize) -> Result<TAsymptoticsReport> {
    if horizon < 10 {
        return Err(Error::InvalidProblem(format!("horizon must be at least 10, got {horizon}")));
    }
    Ok(check_t_values(&ts.values(horizon + 1)))
}

/// Checks `t₀ … t_{len−2}` against every condition, using the final entry
/// only as the successor in the recursion and in the ratio.
pub fn check_t_values(values: &[f64]) -> TAsymptoticsReport {
    let horizon = values.len().saturating_sub(1);
    let violation = first_violation(values, true);
    let start = horizon - window(horizon.max(1)).min(horizon);
    let tail_ratio_deviation = (start..horizon)
        .map(|n| ((values[n] - 1.0) / values[n + 1] - 1.0).abs())
        .fold(0.0, f64::max);
    TAsymptoticsReport {
        horizon,
        violation,
        tail_ratio_deviation,
        passed: violation.is_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayStat {
    pub head_median: f64,
    pub tail_median: f64,
    /// `tail_median / head_median`
    pub ratio: f64,
    /// Tail median is at or below the round-off floor of the run.
    pub at_floor: bool,
}

impl DecayStat {
    fn from_series(series: &[f64], floor: f64) -> Self {
        let w = window(series.len());
        let head_median = median(&series[..w]);
        let tail_median = median(&series[series.len() - w..]);
        let ratio = if head_median > 0.0 {
            tail_median / head_median
        } else if tail_median == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        DecayStat {
            head_median,
            tail_median,
            ratio,
            at_floor: tail_median <= floor,
        }
    }

    pub fn decayed(&self, factor: f64) -> bool {
        self.ratio <= factor || self.at_floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualDecayReport {
    pub xy_residual: DecayStat,
    pub fixed_point_residual: DecayStat,
    pub step_norm: DecayStat,
    pub floor: f64,
}

impl ResidualDecayReport {
    fn stats(&self) -> [&DecayStat; 3] {
        [&self.xy_residual, &self.fixed_point_residual, &self.step_norm]
    }

    /// Every series dropped by `factor` or reached the round-off floor.
    pub fn decayed(&self, factor: f64) -> bool {
        self.stats().iter().all(|s| s.decayed(factor))
    }

    /// Worst ratio among series still above the floor; 0 if none.
    pub fn worst_ratio_above_floor(&self) -> f64 {
        self.stats()
            .iter()
            .filter(|s| !s.at_floor)
            .map(|s| s.ratio)
            .fold(0.0, f64::max)
    }

    pub fn worst_ratio(&self) -> f64 {
        self.xy_residual
            .ratio
            .max(self.fixed_point_residual.ratio)
            .max(self.step_norm.ratio)
    }
}

/// Head and tail medians over records `n ≥ 1`; at `n = 0` the interleaving
/// residual and the step are zero by construction.
pub fn residual_decay(trace: &SolveTrace) -> Result<ResidualDecayReport> {
    let body = &trace.records[1.min(trace.records.len())..];
    if body.is_empty() {
        return Err(Error::InvalidProblem("trace has no iterations".into()));
    }
    let reach = trace.records.iter().map(|r| r.x.norm()).fold(trace.x0.norm(), f64::max);
    let floor = ROUNDOFF_FACTOR * f64::EPSILON * (1.0 + reach);
    let series = |f: fn(&TraceRecord) -> f64| body.iter().map(f).collect::<Vec<_>>();
    Ok(ResidualDecayReport {
        xy_residual: DecayStat::from_series(&series(|r| r.xy_residual), floor),
        fixed_point_residual: DecayStat::from_series(&series(|r| r.fixed_point_residual), floor),
        step_norm: DecayStat::from_series(&series(|r| r.step_norm), floor),
        floor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FejerReport {
    /// `max_{n,s} ‖x_n − s‖ − ‖x₀ − s‖`
    pub max_excess: f64,
    pub worst_sample: usize,
    pub worst_index: usize,
    pub passed: bool,
}

pub fn fejer_check(trace: &SolveTrace, solutions: &[Vector]) -> Result<FejerReport> {
    let mut report = FejerReport {
        max_excess: f64::NEG_INFINITY,
        worst_sample: 0,
        worst_index: 0,
        passed: true,
    };
    for (k, s) in solutions.iter().enumerate() {
        s.check_dim(trace.x0.dim(), "fejer_check")?;
        let start = trace.x0.distance(s);
        for r in &trace.records {
            let excess = r.x.distance(s) - start;
            if excess > report.max_excess {
                report.max_excess = excess;
                report.worst_sample = k;
                report.worst_index = r.n;
            }
        }
    }
    report.passed = report.max_excess <= FEJER_SLACK;
    Ok(report)
}
