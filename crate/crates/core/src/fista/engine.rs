//! The FISTA recursion and its unaccelerated counterpart.
//!
//! ```text
//! y₀ = x₀,  x_{n+1} = T y_n,  y_{n+1} = x_{n+1} + (t_n − 1)/t_{n+1} · (x_{n+1} − x_n)
//! ```

use serde::{Deserialize, Serialize};

use super::TSequence;
use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::problem::{objective_gap, AffineQuadraticProblem, Oracle};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
pub const DIVERGENCE_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub max_iter: usize,
    pub residual_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_iter: DEFAULT_MAX_ITER,
            residual_tol: DEFAULT_RESIDUAL_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIter,
    ResidualTol,
    Diverged,
}

/// Problem and oracle used to annotate a run with gaps and distances.
#[derive(Debug, Clone, Copy)]
pub struct OracleContext<'a> {
    pub problem: &'a AffineQuadraticProblem,
    pub oracle: &'a Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub n: usize,
    pub t_n: f64,
    pub x: Vector,
    pub y: Vector,
    /// `F(x_n) − μ`
    pub objective_gap: Option<f64>,
    /// `‖x_n − P_S x₀‖`
    pub dist_x: Option<f64>,
    pub dist_y: Option<f64>,
    /// `‖x_n − T x_n‖`
    pub fixed_point_residual: f64,
    /// `‖x_n − y_n‖`
    pub xy_residual: f64,
    /// `‖x_n − x_{n−1}‖`, zero at `n = 0`
    pub step_norm: f64,
    /// `(t_n − 1)/t_{n+1}`; zero for Picard runs
    pub momentum_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    pub terminated: Termination,
    pub x0: Vector,
    pub psx0: Option<Vector>,
    pub mu: Option<f64>,
}

impl SolveTrace {
    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("a trace always holds the n = 0 record")
    }

    pub fn iterations(&self) -> usize {
        self.last().n
    }

    pub fn has_oracle_data(&self) -> bool {
        self.psx0.is_some()
    }
}

struct Recorder<'a> {
    t: &'a AffineMap,
    oracle: Option<OracleContext<'a>>,
    psx0: Option<Vector>,
}

impl Recorder<'_> {
    fn record(&self, n: usize, t_n: f64, ratio: f64, x: &Vector, y: &Vector, prev: Option<&Vector>) -> TraceRecord {
        let (objective_gap, dist_x, dist_y) = match (&self.oracle, &self.psx0) {
            (Some(ctx), Some(p)) => (
                Some(objective_gap(ctx.problem, ctx.oracle, x)),
                Some(x.distance(p)),
                Some(y.distance(p)),
            ),
            _ => (None, None, None),
        };
        TraceRecord {
            n,
            t_n,
            x: x.clone(),
            y: y.clone(),
            objective_gap,
            dist_x,
            dist_y,
            fixed_point_residual: x.distance(&self.t.eval(x)),
            xy_residual: x.distance(y),
            step_norm: prev.map_or(0.0, |p| x.distance(p)),
            momentum_ratio: ratio,
        }
    }
}

fn prepare<'a>(t: &'a AffineMap, x0: &Vector, opts: &RunOptions, oracle: Option<OracleContext<'a>>) -> Result<Recorder<'a>> {
    x0.check_dim(t.dim(), "initial point")?;
    if !x0.is_finite() {
        let index = x0.iter().position(|v| !v.is_finite()).unwrap_or(0);
        return Err(Error::NonFinite { index, value: x0[index] });
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidProblem("max_iter must be at least 1".into()));
    }
    if opts.residual_tol.is_nan() || opts.residual_tol < 0.0 {
        return Err(Error::InvalidProblem(format!("residual_tol must be non-negative, got {}", opts.residual_tol)));
    }
    let psx0 = match &oracle {
        Some(ctx) => {
            if ctx.problem.dim() != t.dim() {
                return Err(Error::DimensionMismatch {
                    context: "oracle problem vs operator",
                    expected: t.dim(),
                    found: ctx.problem.dim(),
                });
            }
            Some(ctx.oracle.project(x0)?)
        }
        None => None,
    };
    Ok(Recorder { t, oracle, psx0 })
}

fn blown_up(x: &Vector, limit: f64) -> bool {
    !x.is_finite() || x.norm() > limit
}

fn converged(r: &TraceRecord, tol: f64) -> bool {
    r.fixed_point_residual.max(r.xy_residual) <= tol
}

fn finish(rec: Recorder<'_>, x0: &Vector, records: Vec<TraceRecord>, terminated: Termination) -> SolveTrace {
    SolveTrace {
        records,
        terminated,
        x0: x0.clone(),
        mu: rec.oracle.map(|ctx| ctx.oracle.mu),
        psx0: rec.psx0,
    }
}

pub fn fista_run(
    t: &AffineMap,
    x0: &Vector,
    ts: &TSequence,
    opts: &RunOptions,
    oracle: Option<OracleContext<'_>>,
) -> Result<SolveTrace> {
    ts.validate()?;
    let rec = prepare(t, x0, opts, oracle)?;
    let limit = DIVERGENCE_FACTOR * (1.0 + x0.norm());
    let mut params = ts.iter();
    let mut t_n = params.next().expect("t-sequences are infinite");
    let mut t_next = params.next().expect("t-sequences are infinite");

    let mut x = x0.clone();
    let mut y = x0.clone();
    let mut records = Vec::with_capacity(opts.max_iter.min(1 << 16) + 1);
    records.push(rec.record(0, t_n, (t_n - 1.0) / t_next, &x, &y, None));
    if converged(&records[0], opts.residual_tol) {
        return Ok(finish(rec, x0, records, Termination::ResidualTol));
    }

    for n in 1..=opts.max_iter {
        let ratio = (t_n - 1.0) / t_next;
        let x_new = t.eval(&y);
        let y_new = Vector::from_raw(
            x_new
                .iter()
                .zip(x.iter())
                .map(|(xn, xp)| xn + ratio * (xn - xp))
                .collect(),
        );
        if blown_up(&x_new, limit) || !y_new.is_finite() {
            log::warn!("iterate left the divergence bound at n = {n}; beta is likely too small");
            if x_new.is_finite() && y_new.is_finite() {
                records.push(rec.record(n, t_next, 0.0, &x_new, &y_new, Some(&x)));
            }
            return Ok(finish(rec, x0, records, Termination::Diverged));
        }
        t_n = t_next;
        t_next = params.next().expect("t-sequences are infinite");
        let r = rec.record(n, t_n, (t_n - 1.0) / t_next, &x_new, &y_new, Some(&x));
        let done = converged(&r, opts.residual_tol);
        records.push(r);
        x = x_new;
        y = y_new;
        if done {
            return Ok(finish(rec, x0, records, Termination::ResidualTol));
        }
    }
    Ok(finish(rec, x0, records, Termination::MaxIter))
}

/// `x_{n+1} = T x_n`, recorded with the same fields; `y_n = x_n`.
pub fn picard_run(t: &AffineMap, x0: &Vector, opts: &RunOptions, oracle: Option<OracleContext<'_>>) -> Result<SolveTrace> {
    let rec = prepare(t, x0, opts, oracle)?;
    let limit = DIVERGENCE_FACTOR * (1.0 + x0.norm());
    let mut x = x0.clone();
    let mut records = vec![rec.record(0, 1.0, 0.0, &x, &x, None)];
    if converged(&records[0], opts.residual_tol) {
        return Ok(finish(rec, x0, records, Termination::ResidualTol));
    }
    for n in 1..=opts.max_iter {
        let x_new = t.eval(&x);
        if blown_up(&x_new, limit) {
            if x_new.is_finite() {
                records.push(rec.record(n, 1.0, 0.0, &x_new, &x_new, Some(&x)));
            }
            return Ok(finish(rec, x0, records, Termination::Diverged));
        }
        let r = rec.record(n, 1.0, 0.0, &x_new, &x_new, Some(&x));
        let done = converged(&r, opts.residual_tol);
        records.push(r);
        x = x_new;
        if done {
            return Ok(finish(rec, x0, records, Termination::ResidualTol));
        }
    }
    Ok(finish(rec, x0, records, Termination::MaxIter))
}
