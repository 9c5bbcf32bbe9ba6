//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any of them fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fista_affine::affine::{fixed_point_decompose, range_complement_check, AffineMap, DEFAULT_FIXED_POINT_TOL};
use fista_affine::diagnostics::{
    certify_rate, certify_strong_convergence, check_t_values, fejer_check, residual_decay,
};
use fista_affine::fista::{fista_run, OracleContext, RunOptions, SolveTrace, TSequence};
use fista_affine::instances::{
    build_diagonal, build_friedrichs, build_shift, random_suite, GammaSchedule, SuiteOptions, SuiteProblem,
};
use fista_affine::linalg::{subspace_deviation, LinearMap, Vector};
use fista_affine::problem::{build_prox_grad, build_prox_grad_least_squares_form, solve_oracle, Oracle};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SUITE_SEED: u64 = 20_240_601;

// strong convergence on the random suite
const SUITE_DIST_TOL: f64 = 1e-6;
const SUITE_MAX_ITER: usize = 20_000;
const SUITE_BUDGET: Duration = Duration::from_secs(60);

// worked examples
const EXAMPLE_DIST_TOL: f64 = 1e-5;
const EXAMPLE_MAX_ITER: usize = 50_000;
const EXAMPLE_BUDGET: Duration = Duration::from_secs(120);

const RATE_SLACK: f64 = 1e-6;
const FEJER_SLACK: f64 = 1e-8;
const FEJER_SAMPLES: usize = 10;

const DECAY_ITER: usize = 2000;
const DECAY_FACTOR: f64 = 1e-3;

const T_HORIZON: usize = 100_000;
const T_RATIO_FROM: usize = 1000;
const T_RATIO_TOL: f64 = 0.01;

const FIX_ANGLE_TOL: f64 = 1e-7;
const FIX_ANCHOR_TOL: f64 = 1e-8;
const OPERATOR_FORM_TOL: f64 = 1e-12;
const OPERATOR_PROBES: usize = 100;
const RANGE_COMPLEMENT_TOL: f64 = 1e-8;
const RANGE_COMPLEMENT_MAPS: usize = 50;

const LINEARITY_STEPS: usize = 50;
const LINEARITY_TOL: f64 = 1e-9;
const REPLAY_STEPS: usize = 50;
const REPLAY_TOL: f64 = 1e-12;

const GOLDEN_MIN: usize = 5;

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn outcome(id: &'static str, title: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome {
        id,
        title,
        passed,
        detail,
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::new((0..n).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

fn normalized_ones(n: usize) -> Vector {
    Vector::filled(n, 1.0 / (n as f64).sqrt())
}

fn solve(p: &SuiteProblem, t: &AffineMap, oracle: &Oracle, ts: &TSequence, opts: RunOptions) -> SolveTrace {
    let ctx = OracleContext {
        problem: &p.problem,
        oracle,
    };
    fista_run(t, &p.x0, ts, &opts, Some(ctx)).expect("suite run")
}

fn solution_samples(oracle: &Oracle, x0: &Vector, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let scale = 1.0 + x0.norm();
    (0..FEJER_SAMPLES)
        .map(|k| {
            if k == 0 {
                oracle.anchor.clone()
            } else {
                let c: Vec<f64> = (0..oracle.dim()).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
                oracle.point(&c)
            }
        })
        .collect()
}

/// Criteria 1, 3, 4, 5 and the structural part of 7 share the suite runs.
fn suite_criteria(suite: &[SuiteProblem]) -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 0xfe7e);
    let full = RunOptions {
        max_iter: SUITE_MAX_ITER,
        residual_tol: RunOptions::default().residual_tol,
    };
    let short = RunOptions {
        max_iter: DECAY_ITER,
        residual_tol: 0.0,
    };

    let mut strong_elapsed = Duration::ZERO;
    let mut strong_fail = Vec::new();
    let mut worst_dist: f64 = 0.0;
    let mut max_iters = 0;
    let mut rate_fail = Vec::new();
    let mut worst_rate: f64 = 0.0;
    let mut fejer_fail = Vec::new();
    let mut worst_fejer = f64::NEG_INFINITY;
    let mut decay_fail = Vec::new();
    let mut worst_decay: f64 = 0.0;
    let mut decay_floored = 0;
    let mut fix_fail = Vec::new();
    let mut worst_angle: f64 = 0.0;
    let mut worst_anchor: f64 = 0.0;

    for p in suite {
        let t = build_prox_grad(&p.problem).expect("operator");
        let oracle = solve_oracle(&p.problem).expect("oracle");

        let start = Instant::now();
        let trace = solve(p, &t, &oracle, &TSequence::nesterov(), full);
        strong_elapsed += start.elapsed();
        let strong = certify_strong_convergence(&trace, SUITE_DIST_TOL).unwrap();
        worst_dist = worst_dist.max(strong.final_dist_x.max(strong.final_dist_y));
        max_iters = max_iters.max(trace.iterations());
        if !strong.passed {
            strong_fail.push(format!("{} (dist {:.2e}, kappa {:.0})", p.label, strong.final_dist_x, p.condition));
        }

        let fejer = fejer_check(&trace, &solution_samples(&oracle, &p.x0, &mut rng)).unwrap();
        worst_fejer = worst_fejer.max(fejer.max_excess);
        if fejer.max_excess > FEJER_SLACK {
            fejer_fail.push(format!("{} (+{:.2e})", p.label, fejer.max_excess));
        }

        for (family, tr) in [
            ("nesterov", trace),
            ("linear_half", solve(p, &t, &oracle, &TSequence::linear_half(), full)),
        ] {
            let rate = certify_rate(&tr, p.problem.beta()).unwrap();
            let ratio = rate.sup_scaled_gap / rate.bound_constant.max(f64::MIN_POSITIVE);
            worst_rate = worst_rate.max(ratio);
            if rate.sup_scaled_gap > rate.bound_constant * (1.0 + RATE_SLACK) {
                rate_fail.push(format!("{} {family} (ratio {ratio:.4})", p.label));
            }
        }

        let decay = residual_decay(&solve(p, &t, &oracle, &TSequence::nesterov(), short)).unwrap();
        worst_decay = worst_decay.max(decay.worst_ratio_above_floor());
        if decay.xy_residual.at_floor && decay.fixed_point_residual.at_floor && decay.step_norm.at_floor {
            decay_floored += 1;
        }
        if !decay.decayed(DECAY_FACTOR) {
            decay_fail.push(format!(
                "{} ({:.2e}, kappa {:.0})",
                p.label,
                decay.worst_ratio_above_floor(),
                p.condition
            ));
        }

        let fix = fixed_point_decompose(&t, DEFAULT_FIXED_POINT_TOL).expect("Fix T nonempty");
        let angle = subspace_deviation(&fix.fix_basis, &oracle.basis);
        let anchor = oracle
            .project(&fix.point)
            .unwrap()
            .distance(&fix.point)
            .max(fix.project(&oracle.anchor).unwrap().distance(&oracle.anchor));
        worst_angle = worst_angle.max(angle);
        worst_anchor = worst_anchor.max(anchor);
        if angle > FIX_ANGLE_TOL || anchor > FIX_ANCHOR_TOL {
            fix_fail.push(format!("{} (angle {angle:.2e}, anchor {anchor:.2e})", p.label));
        }
    }

    let list = |v: &[String]| if v.is_empty() { String::new() } else { format!("; failing: {}", v.join(", ")) };
    vec![
        outcome(
            "1",
            "strong convergence to P_S x0 on the random suite",
            strong_fail.is_empty() && strong_elapsed <= SUITE_BUDGET,
            format!(
                "{} problems, worst final distance {worst_dist:.2e} (tol {SUITE_DIST_TOL:e}), most iterations {max_iters}, {:.1}s (budget {}s){}",
                suite.len(),
                strong_elapsed.as_secs_f64(),
                SUITE_BUDGET.as_secs(),
                list(&strong_fail)
            ),
        ),
        outcome(
            "3",
            "rate certificate sup (n+1)^2 gap <= 2 beta |x0 - P_S x0|^2",
            rate_fail.is_empty(),
            format!("both families, worst sup/bound {worst_rate:.4}{}", list(&rate_fail)),
        ),
        outcome(
            "4",
            "Fejer bound |x_n - s| <= |x0 - s| + 1e-8",
            fejer_fail.is_empty(),
            format!("{FEJER_SAMPLES} samples per problem, worst excess {worst_fejer:.2e}{}", list(&fejer_fail)),
        ),
        outcome(
            "5",
            "residual decay: tail median <= 1e-3 x head median",
            decay_fail.is_empty(),
            format!(
                "{DECAY_ITER}-iteration runs, worst tail/head above round-off {worst_decay:.2e} (limit {DECAY_FACTOR:e}), {decay_floored} problems at round-off{}",
                list(&decay_fail)
            ),
        ),
        outcome(
            "7a",
            "Fix T coincides with the oracle solution set",
            fix_fail.is_empty(),
            format!("worst angle {worst_angle:.2e}, worst anchor offset {worst_anchor:.2e}{}", list(&fix_fail)),
        ),
    ]
}

fn example_criteria() -> Vec<Outcome> {
    let floor_schedule = GammaSchedule::Geometric {
        start: 1.0,
        ratio: 0.8,
        floor: Some(0.1),
    };
    let cases = [
        ("2a", "friedrichs m=25 converges to 0", build_friedrichs(25, &GammaSchedule::friedrichs_default())),
        ("2b", "shift m=50 converges to 0", build_shift(50)),
        ("2c", "diagonal m=30 with floor 0.1 converges to 0", build_diagonal(30, &floor_schedule, None)),
    ];
    let opts = RunOptions {
        max_iter: EXAMPLE_MAX_ITER,
        residual_tol: RunOptions::default().residual_tol,
    };
    let started = Instant::now();
    let mut out = Vec::new();
    for (id, title, built) in cases {
        let problem = built.expect("builder");
        let t = build_prox_grad(&problem).unwrap();
        let oracle = solve_oracle(&problem).unwrap();
        let x0 = normalized_ones(problem.dim());
        let start = Instant::now();
        let ctx = OracleContext {
            problem: &problem,
            oracle: &oracle,
        };
        let trace = fista_run(&t, &x0, &TSequence::nesterov(), &opts, Some(ctx)).unwrap();
        let strong = certify_strong_convergence(&trace, EXAMPLE_DIST_TOL).unwrap();
        let best = trace.records.iter().filter_map(|r| r.dist_x).fold(f64::INFINITY, f64::min);
        out.push(outcome(
            id,
            title,
            strong.passed && strong.limit.norm() == 0.0,
            format!(
                "final distance x {:.3e} y {:.3e} after {} iterations (tol {EXAMPLE_DIST_TOL:e}), first hit {:?}, best {best:.3e}, {:.1}s",
                strong.final_dist_x,
                strong.final_dist_y,
                trace.iterations(),
                strong.first_index,
                start.elapsed().as_secs_f64()
            ),
        ));
    }
    let total = started.elapsed();
    out.push(outcome(
        "2d",
        "worked examples finish within the time budget",
        total <= EXAMPLE_BUDGET,
        format!("{:.1}s (budget {}s)", total.as_secs_f64(), EXAMPLE_BUDGET.as_secs()),
    ));
    out
}

fn t_sequence_criterion() -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for (name, seq) in [("nesterov", TSequence::nesterov()), ("linear_half", TSequence::linear_half())] {
        let values = seq.values(T_HORIZON + 2);
        let report = check_t_values(&values);
        let ratio_dev = (T_RATIO_FROM..=T_HORIZON)
            .map(|n| ((values[n] - 1.0) / values[n + 1] - 1.0).abs())
            .fold(0.0, f64::max);
        let ok = values[0] == 1.0 && report.violation.is_none() && ratio_dev <= T_RATIO_TOL;
        passed &= ok;
        details.push(format!("{name}: violation {:?}, max ratio deviation {ratio_dev:.2e}", report.violation));
    }
    outcome(
        "6",
        "t-sequence bounds up to n = 1e5 and momentum ratio limit",
        passed,
        details.join("; "),
    )
}

fn random_nonexpansive(rng: &mut ChaCha8Rng, i: usize) -> LinearMap {
    let n = 2 + i % 12;
    let q = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal)).qr().q();
    match i % 3 {
        // P_V P_U
        0 => {
            let k = 1 + rng.random_range(0..n);
            let l = 1 + rng.random_range(0..n);
            let basis = |m: &DMatrix<f64>, k: usize| -> Vec<Vector> {
                (0..k).map(|j| Vector::new(m.column(j).iter().copied().collect()).unwrap()).collect()
            };
            let q2 = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal)).qr().q();
            LinearMap::compose(
                LinearMap::projector(n, &basis(&q, k)).unwrap(),
                LinearMap::projector(n, &basis(&q2, l)).unwrap(),
            )
            .unwrap()
        }
        // identity on a subspace, a rotation, and a contraction
        1 => {
            let k = rng.random_range(0..n);
            let mut block = DMatrix::zeros(n, n);
            for j in 0..k {
                block[(j, j)] = 1.0;
            }
            let mut j = k;
            if j + 1 < n {
                let th: f64 = rng.random_range(0.1..3.0);
                block[(j, j)] = th.cos();
                block[(j, j + 1)] = -th.sin();
                block[(j + 1, j)] = th.sin();
                block[(j + 1, j + 1)] = th.cos();
                j += 2;
            }
            if j < n {
                let m = n - j;
                let c = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
                let c = &c * (0.9 / c.norm());
                block.view_mut((j, j), (m, m)).copy_from(&c);
            }
            LinearMap::from_matrix(&q * block * q.transpose())
        }
        // generic contraction
        _ => {
            let c = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let s = c.clone().svd(false, false).singular_values.max();
            LinearMap::from_matrix(c / s)
        }
    }
}

fn structural_criteria() -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 0x57);
    let mut worst_form: f64 = 0.0;
    for m in [1, 2, 5, 10, 25] {
        let p = build_friedrichs(m, &GammaSchedule::friedrichs_default()).unwrap();
        let direct = build_prox_grad(&p).unwrap();
        let generic = build_prox_grad_least_squares_form(&p).unwrap();
        for _ in 0..OPERATOR_PROBES {
            let x = gaussian(&mut rng, p.dim());
            worst_form = worst_form.max(direct.evaluate(&x).unwrap().distance(&generic.evaluate(&x).unwrap()));
        }
    }
    let mut worst_range: f64 = 0.0;
    let mut worst_map = 0;
    let mut nontrivial = 0;
    for i in 0..RANGE_COMPLEMENT_MAPS {
        let l = random_nonexpansive(&mut rng, i);
        let report = range_complement_check(&l).unwrap();
        if report.fix_complement_dim > 0 && report.fix_complement_dim < l.in_dim() {
            nontrivial += 1;
        }
        let deviation = if report.fix_complement_dim == report.range_dim {
            report.deviation
        } else {
            f64::INFINITY
        };
        if deviation > worst_range {
            worst_range = deviation;
            worst_map = i;
        }
    }
    vec![
        outcome(
            "7b",
            "prox-grad form equals P_V P_U on friedrichs instances",
            worst_form <= OPERATOR_FORM_TOL,
            format!("worst difference {worst_form:.2e} over {OPERATOR_PROBES} probes for each of 5 sizes"),
        ),
        outcome(
            "7c",
            "(Fix L)^perp equals ran(Id - L) for random nonexpansive L",
            worst_range <= RANGE_COMPLEMENT_TOL,
            format!(
                "{RANGE_COMPLEMENT_MAPS} maps ({nontrivial} with proper nonzero Fix L), worst deviation {worst_range:.2e} (map {worst_map})"
            ),
        ),
    ]
}

fn run_steps(t: &AffineMap, x0: &Vector, steps: usize) -> SolveTrace {
    let opts = RunOptions {
        max_iter: steps,
        residual_tol: -0.0,
    };
    fista_run(t, x0, &TSequence::nesterov(), &opts, None).unwrap()
}

fn commutation_criteria(suite: &[SuiteProblem]) -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 0xc0);
    let mut worst_lin: f64 = 0.0;
    let mut worst_replay: f64 = 0.0;
    for p in suite {
        let t = build_prox_grad(&p.problem).unwrap();
        let l = t.linear_part();
        let n = p.problem.dim();
        let (a, b) = (gaussian(&mut rng, n), gaussian(&mut rng, n));
        let alpha: f64 = rng.random_range(-2.0..2.0);
        let mut combo = b.clone();
        combo.axpy(alpha, &a);
        let xa = run_steps(&l, &a, LINEARITY_STEPS);
        let xb = run_steps(&l, &b, LINEARITY_STEPS);
        let xc = run_steps(&l, &combo, LINEARITY_STEPS);
        if xa.records.len() == LINEARITY_STEPS + 1 && xb.records.len() == xa.records.len() && xc.records.len() == xa.records.len() {
            let mut expect = xb.last().x.clone();
            expect.axpy(alpha, &xa.last().x);
            worst_lin = worst_lin.max(xc.last().x.distance(&expect));
        } else {
            worst_lin = f64::INFINITY;
        }

        let fix = fixed_point_decompose(&t, DEFAULT_FIXED_POINT_TOL).unwrap();
        let shifted = &p.x0 - &fix.point;
        let affine = run_steps(&t, &p.x0, REPLAY_STEPS);
        let linear = run_steps(&l, &shifted, REPLAY_STEPS);
        if affine.records.len() != linear.records.len() {
            worst_replay = f64::INFINITY;
        }
        for (ra, rl) in affine.records.iter().zip(&linear.records) {
            worst_replay = worst_replay.max((&ra.x - &fix.point).distance(&rl.x));
        }
    }
    vec![
        outcome(
            "8a",
            "x0 -> x_50 is linear for zero-translation T",
            worst_lin <= LINEARITY_TOL,
            format!("{} maps, worst defect {worst_lin:.2e}", suite.len()),
        ),
        outcome(
            "8b",
            "x_n - a replays the linear-part run",
            worst_replay <= REPLAY_TOL,
            format!("{} problems x {REPLAY_STEPS} steps, worst difference {worst_replay:.2e}", suite.len()),
        ),
    ]
}

fn cli_artifacts(config: &Path, dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fista-affine"))
        .args(["solve", "--dump-iterates", "--config"])
        .arg(config)
        .arg("--out-prefix")
        .arg(dir.join("run"))
        .env_remove("FISTA_AFFINE_LOG")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("exit {:?}", status.status.code()));
    }
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&path).unwrap())
        })
        .collect();
    files.sort();
    Ok(files)
}

fn determinism_criterion() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut configs: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("golden config directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    let mut failing = Vec::new();
    let mut files = 0;
    for config in &configs {
        let name = config.file_stem().unwrap().to_string_lossy().into_owned();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        match (cli_artifacts(config, a.path()), cli_artifacts(config, b.path())) {
            (Ok(x), Ok(y)) if x == y => files += x.len(),
            (Ok(_), Ok(_)) => failing.push(format!("{name} (artifacts differ)")),
            (Err(e), _) | (_, Err(e)) => failing.push(format!("{name} ({e})")),
        }
    }
    outcome(
        "9",
        "repeated CLI runs on golden configs are byte-identical",
        failing.is_empty() && configs.len() >= GOLDEN_MIN,
        format!(
            "{} configs (at least {GOLDEN_MIN}), {files} artifacts compared{}",
            configs.len(),
            if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(", ")) }
        ),
    )
}

fn main() -> ExitCode {
    let suite = random_suite(SUITE_SEED, &SuiteOptions::default()).expect("suite generation");
    let mut outcomes = suite_criteria(&suite);
    outcomes.extend(example_criteria());
    outcomes.push(t_sequence_criterion());
    outcomes.extend(structural_criteria());
    outcomes.extend(commutation_criteria(&suite));
    outcomes.push(determinism_criterion());
    outcomes.sort_by(|a, b| a.id.cmp(b.id));

    let mut failed = 0;
    for o in &outcomes {
        println!("{} criterion {:<3} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
