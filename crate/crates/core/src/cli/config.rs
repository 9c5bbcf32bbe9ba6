use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fista::TSequence;
use crate::instances::GammaSchedule;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CERTIFY_TOL: f64 = 1e-6;

fn default_residual_tol() -> f64 {
    crate::fista::DEFAULT_RESIDUAL_TOL
}

fn default_certify_tol() -> f64 {
    DEFAULT_CERTIFY_TOL
}

/// One experiment: a problem, a start point and a parameter sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub problem: ProblemSpec,
    pub x0: StartSpec,
    #[serde(default = "TSequence::nesterov")]
    pub t_sequence: TSequence,
    #[serde(default)]
    pub beta: BetaSpec,
    pub max_iter: usize,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    /// Distance to `P_S x₀` that counts as converged.
    #[serde(default = "default_certify_tol")]
    pub certify_tol: f64,
    #[serde(default)]
    pub baseline: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_prefix: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Friedrichs {
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_schedule: Option<GammaSchedule>,
    },
    Shift {
        m: usize,
    },
    Diagonal {
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_schedule: Option<GammaSchedule>,
    },
    AltProjections {
        u: SubspaceSpec,
        v: SubspaceSpec,
    },
    /// `½‖Ax − b‖²`, over `constraint` when given.
    Dense {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        constraint: Option<SubspaceSpec>,
    },
    QuadraticForm {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        constraint: Option<SubspaceSpec>,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Friedrichs { .. } => "friedrichs",
            ProblemSpec::Shift { .. } => "shift",
            ProblemSpec::Diagonal { .. } => "diagonal",
            ProblemSpec::AltProjections { .. } => "alt_projections",
            ProblemSpec::Dense { .. } => "dense",
            ProblemSpec::QuadraticForm { .. } => "quadratic_form",
        }
    }
}

/// `point + span(directions)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub point: Vec<f64>,
    #[serde(default)]
    pub directions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StartSpec {
    Explicit(Vec<f64>),
    /// Gaussian entries with standard deviation `scale`.
    Random { seed: u64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "BetaRepr", into = "BetaRepr")]
pub enum BetaSpec {
    #[default]
    Auto,
    Value(f64),
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(untagged, expecting = "a positive number or \"auto\"")]
enum BetaRepr {
    Value(f64),
    Keyword(Keyword),
}

#[derive(Clone, Copy, Serialize, Deserialize)]
enum Keyword {
    #[serde(rename = "auto")]
    Auto,
}

impl From<BetaRepr> for BetaSpec {
    fn from(r: BetaRepr) -> Self {
        match r {
            BetaRepr::Value(v) => BetaSpec::Value(v),
            BetaRepr::Keyword(Keyword::Auto) => BetaSpec::Auto,
        }
    }
}

impl From<BetaSpec> for BetaRepr {
    fn from(b: BetaSpec) -> Self {
        match b {
            BetaSpec::Value(v) => BetaRepr::Value(v),
            BetaSpec::Auto => BetaRepr::Keyword(Keyword::Auto),
        }
    }
}

impl fmt::Display for BetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaSpec::Auto => f.write_str("auto"),
            BetaSpec::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Unreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema violation in {path} at `{field}`: {message}")]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{path}: `schema` must be {SCHEMA_VERSION}, found {found}")]
    Version { path: PathBuf, found: u32 },
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            ConfigError::Schema {
                path: origin.to_path_buf(),
                field: if field == "." { "<root>".into() } else { field },
                message: e.into_inner().to_string(),
            }
        })?;
        if config.schema != SCHEMA_VERSION {
            return Err(ConfigError::Version {
                path: origin.to_path_buf(),
                found: config.schema,
            });
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// `output_prefix` if set, else the config path without its extension.
    pub fn resolve_prefix(&self, config_path: &Path) -> PathBuf {
        match &self.output_prefix {
            Some(p) => p.clone(),
            None => config_path.with_extension(""),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIFT: &str = r#"{
        "schema": 1,
        "problem": {"kind": "shift", "m": 4},
        "x0": {"explicit": [1, 0, 0, 0]},
        "max_iter": 100
    }"#;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_json(text, Path::new("test.json"))
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse(SHIFT).unwrap();
        assert_eq!(c.t_sequence, TSequence::nesterov());
        assert_eq!(c.beta, BetaSpec::Auto);
        assert_eq!(c.residual_tol, 1e-10);
        assert!(!c.baseline);
    }

    #[test]
    fn round_trip() {
        let c = parse(SHIFT).unwrap();
        assert_eq!(parse(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn beta_forms() {
        let auto = SHIFT.replace("\"max_iter\"", "\"beta\": \"auto\", \"max_iter\"");
        assert_eq!(parse(&auto).unwrap().beta, BetaSpec::Auto);
        let num = SHIFT.replace("\"max_iter\"", "\"beta\": 4.5, \"max_iter\"");
        assert_eq!(parse(&num).unwrap().beta, BetaSpec::Value(4.5));
        let bad = SHIFT.replace("\"max_iter\"", "\"beta\": \"big\", \"max_iter\"");
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn missing_max_iter_names_the_field() {
        let text = SHIFT.replace(",\n        \"max_iter\": 100", "");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("max_iter"), "{msg}");
    }

    #[test]
    fn negative_dimension_rejected_at_the_field() {
        let msg = parse(&SHIFT.replace("\"m\": 4", "\"m\": -3")).unwrap_err().to_string();
        assert!(msg.contains("`problem`") && msg.contains("-3"), "{msg}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let top = SHIFT.replace("\"max_iter\"", "\"colour\": 1, \"max_iter\"");
        assert!(parse(&top).unwrap_err().to_string().contains("colour"));
        let nested = SHIFT.replace("\"m\": 4", "\"m\": 4, \"n\": 2");
        assert!(parse(&nested).is_err());
    }

    #[test]
    fn wrong_schema_version() {
        let msg = parse(&SHIFT.replace("\"schema\": 1", "\"schema\": 2")).unwrap_err().to_string();
        assert!(msg.contains("schema"), "{msg}");
    }
}
