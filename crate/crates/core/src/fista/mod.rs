//! Momentum sequences and the accelerated iteration.

mod engine;
mod tseq;

pub use engine::{
    fista_run, picard_run, OracleContext, RunOptions, SolveTrace, Termination, TraceRecord, DEFAULT_MAX_ITER,
    DEFAULT_RESIDUAL_TOL, DIVERGENCE_FACTOR,
};
pub use tseq::{
    first_violation, lower_bound, nesterov_step, upper_bound, TCondition, TIter, TSequence, LOWER_BOUND_TOL,
    RECURSION_TOL, UPPER_BOUND_TOL,
};
