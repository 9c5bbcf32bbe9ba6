use std::fmt;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::config::{BetaSpec, ConfigError, ExperimentConfig, ProblemSpec, StartSpec, SubspaceSpec};
use super::output;
use crate::affine::{AffineMap, AffineSubspace};
use crate::diagnostics::{
    certify_rate, certify_strong_convergence, check_t_values, residual_decay, RateCertificate,
    ResidualDecayReport, StrongConvergenceReport, TAsymptoticsReport,
};
use crate::fista::{fista_run, picard_run, OracleContext, RunOptions, SolveTrace, Termination};
use crate::instances::{alternating_cross_check, build_diagonal, build_friedrichs, build_shift, GammaSchedule};
use crate::linalg::{LinearMap, Vector};
use crate::problem::{build_prox_grad, solve_oracle, AffineQuadraticProblem, Oracle, ProblemKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid `{field}`: {message}")]
    Build { field: String, message: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn build_err(field: impl Into<String>, e: impl fmt::Display) -> CliError {
    CliError::Build {
        field: field.into(),
        message: e.to_string(),
    }
}

/// Everything a run needs, derived from a config.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub problem: AffineQuadraticProblem,
    pub operator: AffineMap,
    pub oracle: Oracle,
    pub x0: Vector,
}

fn vector(field: &str, entries: &[f64]) -> Result<Vector, CliError> {
    Vector::from_slice(entries).map_err(|e| build_err(field, e))
}

fn subspace(field: &str, spec: &SubspaceSpec) -> Result<AffineSubspace, CliError> {
    let point = vector(&format!("{field}.point"), &spec.point)?;
    let directions = spec
        .directions
        .iter()
        .enumerate()
        .map(|(i, d)| vector(&format!("{field}.directions[{i}]"), d))
        .collect::<Result<Vec<_>, _>>()?;
    AffineSubspace::new(point, &directions).map_err(|e| build_err(field, e))
}

fn build_problem(spec: &ProblemSpec) -> Result<AffineQuadraticProblem, CliError> {
    let schedule = |s: &Option<GammaSchedule>, fallback: fn() -> GammaSchedule| s.clone().unwrap_or_else(fallback);
    match spec {
        ProblemSpec::Friedrichs { m, gamma_schedule } => {
            build_friedrichs(*m, &schedule(gamma_schedule, GammaSchedule::friedrichs_default))
                .map_err(|e| build_err("problem", e))
        }
        ProblemSpec::Shift { m } => build_shift(*m).map_err(|e| build_err("problem.m", e)),
        ProblemSpec::Diagonal { m, gamma_schedule } => {
            build_diagonal(*m, &schedule(gamma_schedule, GammaSchedule::diagonal_default), None)
                .map_err(|e| build_err("problem", e))
        }
        ProblemSpec::AltProjections { u, v } => {
            let (u, v) = (subspace("problem.u", u)?, subspace("problem.v", v)?);
            crate::instances::build_alternating(u, v).map_err(|e| build_err("problem", e))
        }
        ProblemSpec::Dense { a, b, constraint } => {
            let a = LinearMap::dense(a).map_err(|e| build_err("problem.a", e))?;
            let b = vector("problem.b", b)?;
            match constraint {
                Some(c) => {
                    let v = subspace("problem.constraint", c)?;
                    AffineQuadraticProblem::constrained_least_squares(a, b, v, None)
                }
                None => AffineQuadraticProblem::unconstrained_least_squares(a, b, None),
            }
            .map_err(|e| build_err("problem", e))
        }
        ProblemSpec::QuadraticForm { a, b, constraint } => {
            let a = LinearMap::dense(a).map_err(|e| build_err("problem.a", e))?;
            let b = vector("problem.b", b)?;
            let v = match constraint {
                Some(c) => subspace("problem.constraint", c)?,
                None => AffineSubspace::whole_space(a.in_dim()),
            };
            AffineQuadraticProblem::quadratic_form(a, b, v, None).map_err(|e| build_err("problem", e))
        }
    }
}

fn start_point(spec: &StartSpec, dim: usize) -> Result<Vector, CliError> {
    match spec {
        StartSpec::Explicit(entries) => {
            let x0 = vector("x0.explicit", entries)?;
            x0.check_dim(dim, "x0").map_err(|e| build_err("x0.explicit", e))?;
            Ok(x0)
        }
        StartSpec::Random { seed, scale } => {
            if !scale.is_finite() || *scale <= 0.0 {
                return Err(build_err("x0.random.scale", format!("must be positive and finite, got {scale}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let entries = (0..dim)
                .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                .collect();
            Vector::new(entries).map_err(|e| build_err("x0.random", e))
        }
    }
}

fn check_options(config: &ExperimentConfig) -> Result<RunOptions, CliError> {
    if !(config.residual_tol >= 0.0 && config.residual_tol.is_finite()) {
        return Err(build_err("residual_tol", format!("must be finite and >= 0, got {}", config.residual_tol)));
    }
    if !(config.certify_tol > 0.0 && config.certify_tol.is_finite()) {
        return Err(build_err("certify_tol", format!("must be positive and finite, got {}", config.certify_tol)));
    }
    config.t_sequence.validate().map_err(|e| build_err("t_sequence", e))?;
    Ok(RunOptions {
        max_iter: config.max_iter,
        residual_tol: config.residual_tol,
    })
}

/// Schema-checked config to problem, operator, oracle and start point.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared, CliError> {
    check_options(config)?;
    let mut problem = build_problem(&config.problem)?;
    if let BetaSpec::Value(beta) = config.beta {
        problem = problem.with_beta(beta).map_err(|e| build_err("beta", e))?;
    }
    let operator = build_prox_grad(&problem).map_err(|e| build_err("problem", e))?;
    let oracle = solve_oracle(&problem).map_err(|e| build_err("problem", e))?;
    if problem.kind() == ProblemKind::AlternatingProjections {
        match alternating_cross_check(&problem) {
            Ok(check) => log::info!(
                "fixed-point cross-check: basis deviation {:e}, anchor offset {:e}",
                check.basis_deviation,
                check.anchor_offset
            ),
            Err(e) => log::warn!("fixed-point cross-check failed: {e}"),
        }
    }
    let x0 = start_point(&config.x0, problem.dim())?;
    Ok(Prepared {
        problem,
        operator,
        oracle,
        x0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub problem: &'static str,
    pub dim: usize,
    pub constraint_dim: usize,
    pub solution_dim: usize,
    pub beta: f64,
    pub beta_hat: (f64, f64),
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem: {}", self.problem)?;
        writeln!(f, "dimension: {}", self.dim)?;
        writeln!(f, "constraint dimension: {}", self.constraint_dim)?;
        writeln!(f, "solution set dimension: {}", self.solution_dim)?;
        writeln!(f, "β̂ ∈ [{}, {}]", short(self.beta_hat.0), short(self.beta_hat.1))?;
        write!(f, "beta: {}", self.beta)
    }
}

/// Six significant decimals, trailing zeros dropped.
fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub fn validate_config(path: &Path) -> Result<ValidationReport, CliError> {
    let config = ExperimentConfig::load(path)?;
    let p = prepare(&config)?;
    let est = p.problem.norm_estimate();
    Ok(ValidationReport {
        problem: config.problem.name(),
        dim: p.problem.dim(),
        constraint_dim: p.problem.constraint().dim(),
        solution_dim: p.oracle.dim(),
        beta: p.problem.beta(),
        beta_hat: (est.rayleigh, est.upper),
    })
}

#[derive(Debug, Clone, Serialize)]
struct ProblemSummary {
    name: &'static str,
    kind: ProblemKind,
    dim: usize,
    constraint_dim: usize,
    beta: f64,
    beta_hat_lower: f64,
    beta_hat_upper: f64,
}

#[derive(Debug, Clone, Serialize)]
struct OracleSummary {
    solution_dim: usize,
    mu: f64,
}

#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    iterations: usize,
    terminated: Termination,
    strong_convergence: StrongConvergenceReport,
    residual_decay: Option<ResidualDecayReport>,
}

#[derive(Debug, Clone, Serialize)]
struct Certifications {
    strong_convergence: bool,
    t_sequence: bool,
    not_diverged: bool,
    /// Flagged only; does not affect `passed`.
    rate_within_classical_constant: bool,
}

#[derive(Debug, Clone, Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    problem: ProblemSummary,
    oracle: OracleSummary,
    fista: RunSummary,
    rate: RateCertificate,
    t_sequence: TAsymptoticsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<RunSummary>,
    certifications: Certifications,
    passed: bool,
}

fn summarize(trace: &SolveTrace, tol: f64) -> RunSummary {
    RunSummary {
        iterations: trace.iterations(),
        terminated: trace.terminated,
        strong_convergence: certify_strong_convergence(trace, tol).expect("oracle-backed trace"),
        residual_decay: residual_decay(trace).ok(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary_path: PathBuf,
    pub passed: bool,
}

/// Runs one experiment and writes `<prefix>.trace.csv` and
/// `<prefix>.summary.json`.
pub fn run_experiment(config: &ExperimentConfig, prefix: &Path, dump_iterates: bool) -> Result<Outcome, CliError> {
    let p = prepare(config)?;
    let opts = check_options(config)?;
    let ctx = OracleContext {
        problem: &p.problem,
        oracle: &p.oracle,
    };
    log::info!(
        "{}: dim {}, beta {}, {} iterations at most",
        config.problem.name(),
        p.problem.dim(),
        p.problem.beta(),
        opts.max_iter
    );
    let trace = fista_run(&p.operator, &p.x0, &config.t_sequence, &opts, Some(ctx))
        .map_err(|e| build_err("t_sequence", e))?;
    let baseline = if config.baseline {
        Some(picard_run(&p.operator, &p.x0, &opts, Some(ctx)).map_err(|e| build_err("baseline", e))?)
    } else {
        None
    };

    let fista = summarize(&trace, config.certify_tol);
    let rate = certify_rate(&trace, p.problem.beta()).expect("oracle-backed trace");
    let t_sequence = check_t_values(&config.t_sequence.values(trace.iterations().max(1) + 1));
    let certifications = Certifications {
        strong_convergence: fista.strong_convergence.passed,
        t_sequence: t_sequence.passed,
        not_diverged: trace.terminated != Termination::Diverged,
        rate_within_classical_constant: rate.passed,
    };
    if !rate.passed {
        log::warn!(
            "scaled gap {:e} exceeds the classical constant {:e} at n = {}",
            rate.sup_scaled_gap,
            rate.bound_constant,
            rate.worst_index
        );
    }
    let passed = certifications.strong_convergence && certifications.t_sequence && certifications.not_diverged;
    let est = p.problem.norm_estimate();
    let summary = Summary {
        config,
        problem: ProblemSummary {
            name: config.problem.name(),
            kind: p.problem.kind(),
            dim: p.problem.dim(),
            constraint_dim: p.problem.constraint().dim(),
            beta: p.problem.beta(),
            beta_hat_lower: est.rayleigh,
            beta_hat_upper: est.upper,
        },
        oracle: OracleSummary {
            solution_dim: p.oracle.dim(),
            mu: p.oracle.mu,
        },
        baseline: baseline.as_ref().map(|b| summarize(b, config.certify_tol)),
        fista,
        rate,
        t_sequence,
        certifications,
        passed,
    };

    let path = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    output::write_trace(&path(".trace.csv"), &trace)?;
    if let Some(b) = &baseline {
        output::write_trace(&path(".baseline.trace.csv"), b)?;
    }
    if dump_iterates {
        if p.problem.dim() > output::DUMP_DIM_WARN {
            log::warn!("dumping iterates of dimension {}", p.problem.dim());
        }
        output::write_iterates(&path(".iterates.csv"), &trace)?;
    }
    let summary_path = path(".summary.json");
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    std::fs::write(&summary_path, json).map_err(|source| CliError::Write {
        path: summary_path.clone(),
        source,
    })?;
    log::info!("passed: {passed}, {} iterations", trace.iterations());
    Ok(Outcome { summary_path, passed })
}
