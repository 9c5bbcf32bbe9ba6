use std::path::Path;

use super::experiment::CliError;
use crate::fista::SolveTrace;

pub const TRACE_HEADER: [&str; 8] = [
    "n",
    "t_n",
    "objective_gap",
    "dist_to_psx0_x",
    "dist_to_psx0_y",
    "fixed_point_residual",
    "xy_residual",
    "momentum_ratio",
];

pub const DUMP_DIM_WARN: usize = 100;

/// Shortest string that parses back to the same `f64`.
pub fn float(v: f64) -> String {
    ryu::Buffer::new().format(v).to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

fn write_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Write {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

pub fn write_trace(path: &Path, trace: &SolveTrace) -> Result<(), CliError> {
    let err = write_err(path);
    let mut w = csv::Writer::from_path(path).map_err(&err)?;
    w.write_record(TRACE_HEADER).map_err(&err)?;
    for r in &trace.records {
        w.write_record([
            r.n.to_string(),
            float(r.t_n),
            opt(r.objective_gap),
            opt(r.dist_x),
            opt(r.dist_y),
            float(r.fixed_point_residual),
            float(r.xy_residual),
            float(r.momentum_ratio),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::Write {
        path: path.to_path_buf(),
        source: e,
    })
}

/// `n, x_0 … x_{d−1}, y_0 … y_{d−1}`
pub fn write_iterates(path: &Path, trace: &SolveTrace) -> Result<(), CliError> {
    let err = write_err(path);
    let dim = trace.x0.dim();
    let mut w = csv::Writer::from_path(path).map_err(&err)?;
    let header = std::iter::once("n".to_string())
        .chain((0..dim).map(|i| format!("x_{i}")))
        .chain((0..dim).map(|i| format!("y_{i}")));
    w.write_record(header).map_err(&err)?;
    for r in &trace.records {
        let row = std::iter::once(r.n.to_string())
            .chain(r.x.iter().map(|v| float(*v)))
            .chain(r.y.iter().map(|v| float(*v)));
        w.write_record(row).map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::Write {
        path: path.to_path_buf(),
        source: e,
    })
}
