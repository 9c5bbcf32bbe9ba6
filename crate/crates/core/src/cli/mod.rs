//! Config-driven experiments: `solve`, `validate` and `sweep`.

mod config;
mod experiment;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};

pub use config::{
    BetaSpec, ConfigError, ExperimentConfig, ProblemSpec, StartSpec, SubspaceSpec, DEFAULT_CERTIFY_TOL,
    SCHEMA_VERSION,
};
pub use experiment::{prepare, run_experiment, validate_config, CliError, Outcome, Prepared, ValidationReport};
pub use output::{float, TRACE_HEADER};

pub const LOG_ENV: &str = "FISTA_AFFINE_LOG";

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_CERTIFICATION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "fista-affine", version, about = "FISTA on affinely constrained quadratics, checked against a least-squares oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its trace and summary.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Also write every iterate to `<prefix>.iterates.csv`.
        #[arg(long)]
        dump_iterates: bool,
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Check a config and build its problem without iterating.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run every `*.json` config in a directory.
    Sweep {
        #[arg(long)]
        config_dir: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
}

fn solve_one(config_path: &Path, out_prefix: Option<&Path>, dump_iterates: bool) -> Result<Outcome, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let prefix = out_prefix.map(Path::to_path_buf).unwrap_or_else(|| config.resolve_prefix(config_path));
    run_experiment(&config, &prefix, dump_iterates)
}

fn exit_code(result: &Result<Outcome, CliError>) -> u8 {
    match result {
        Ok(o) if o.passed => EXIT_OK,
        Ok(_) => EXIT_CERTIFICATION,
        Err(_) => EXIT_ERROR,
    }
}

fn sweep(dir: &Path, jobs: usize) -> u8 {
    let mut configs: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read config directory {}: {e}", dir.display());
            return EXIT_ERROR;
        }
    };
    configs.sort();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![None; configs.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.min(configs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = configs.get(i) else { break };
                let result = solve_one(path, None, false);
                let code = exit_code(&result);
                let line = match result {
                    Ok(o) => Ok(o.summary_path),
                    Err(e) => Err(format!("{}: {e}", path.display())),
                };
                results.lock().expect("no panics while holding the lock")[i] = Some((code, line));
            });
        }
    });
    let mut worst = EXIT_OK;
    for (code, line) in results.into_inner().expect("threads joined").into_iter().flatten() {
        match line {
            Ok(p) => println!("{}", p.display()),
            Err(msg) => eprintln!("error: {msg}"),
        }
        worst = worst.max(code);
    }
    worst
}

pub fn run(cli: Cli) -> ExitCode {
    let code = match cli.command {
        Command::Solve {
            config,
            dump_iterates,
            out_prefix,
        } => {
            let result = solve_one(&config, out_prefix.as_deref(), dump_iterates);
            match &result {
                Ok(o) => println!("{}", o.summary_path.display()),
                Err(e) => eprintln!("error: {e}"),
            }
            exit_code(&result)
        }
        Command::Validate { config } => match validate_config(&config) {
            Ok(report) => {
                println!("{report}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Sweep { config_dir, jobs } => sweep(&config_dir, jobs as usize),
    };
    ExitCode::from(code)
}

pub fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .format_timestamp(None)
        .init();
}
