use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shimorin::{Complex64, HProfile, MeasureOnUnitInterval, RadialWeightProfile};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Classify,
    Coefficients,
    KernelEval,
    WeightMoments,
    Dhat,
    FitH,
    Certify,
    RoundTrip,
}

impl Task {
    pub fn needs_measure(self) -> bool {
        !matches!(self, Task::WeightMoments | Task::Dhat)
    }

    pub fn needs_weight(self) -> bool {
        self == Task::WeightMoments
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&name)
    }
}

/// `x = z·λ̄`, given as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalPoint {
    Real(f64),
    Complex([f64; 2]),
}

impl EvalPoint {
    pub fn value(self) -> Complex64 {
        match self {
            EvalPoint::Real(x) => Complex64::new(x, 0.0),
            EvalPoint::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn default_max_n() -> usize {
    50
}
fn default_tol() -> f64 {
    1e-10
}
fn default_grid_points() -> usize {
    48
}
fn default_eval_points() -> Vec<EvalPoint> {
    vec![EvalPoint::Real(0.25), EvalPoint::Real(0.5)]
}
fn default_dhat_ceiling() -> f64 {
    2.0
}
fn default_fit_moments() -> usize {
    24
}
fn default_feasibility_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub measure: Option<MeasureOnUnitInterval>,
    #[serde(default)]
    pub weight: Option<RadialWeightProfile>,
    #[serde(default)]
    pub h_profile: Option<HProfile>,
    pub tasks: Vec<Task>,
    /// Largest coefficient or moment index reported.
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    /// Tolerance for kernel matching and series truncation.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Points of the `t`-grid used by profile fits and convexity checks.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_eval_points")]
    pub eval_points: Vec<EvalPoint>,
    #[serde(default = "default_dhat_ceiling")]
    pub dhat_ceiling: f64,
    /// Number of moment conditions imposed by fit-h and certify.
    #[serde(default = "default_fit_moments")]
    pub fit_moments: usize,
    #[serde(default = "default_feasibility_tol")]
    pub feasibility_tol: f64,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub max_n: Option<usize>,
    pub tol: Option<f64>,
    pub grid_points: Option<usize>,
    pub eval_points: Vec<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<(), ConfigError> {
        if let Some(n) = overrides.max_n {
            self.max_n = n;
        }
        if let Some(tol) = overrides.tol {
            self.tol = tol;
        }
        if let Some(points) = overrides.grid_points {
            self.grid_points = points;
        }
        if !overrides.eval_points.is_empty() {
            self.eval_points = overrides.eval_points.iter().map(|&x| EvalPoint::Real(x)).collect();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Validation(msg));
        if self.tasks.is_empty() {
            return invalid("at least one task is required".into());
        }
        let mut seen = HashSet::new();
        for &task in &self.tasks {
            if !seen.insert(task) {
                return invalid(format!("task {task} is listed twice"));
            }
            if task.needs_weight() && self.weight.is_none() {
                return invalid(format!("task {task} requires a weight"));
            }
            if task.needs_measure() && self.measure.is_none() {
                return invalid(format!("task {task} requires a measure"));
            }
            if task == Task::Dhat && self.measure.is_none() && self.weight.is_none() {
                return invalid("task dhat requires a measure or a weight".into());
            }
            if task == Task::Certify && self.h_profile.is_none() && !self.tasks.contains(&Task::FitH) {
                return invalid("task certify requires an h-profile or an earlier fit-h task".into());
            }
        }
        if let (Some(c), Some(f)) =
            (self.tasks.iter().position(|&t| t == Task::Certify), self.tasks.iter().position(|&t| t == Task::FitH))
        {
            if self.h_profile.is_none() && f > c {
                return invalid("certify must come after fit-h when no h-profile is given".into());
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return invalid(format!("tol = {} must be positive", self.tol));
        }
        if !(self.feasibility_tol.is_finite() && self.feasibility_tol > 0.0) {
            return invalid(format!("feasibility-tol = {} must be positive", self.feasibility_tol));
        }
        if self.grid_points < 3 {
            return invalid(format!("grid-points = {} must be at least 3", self.grid_points));
        }
        if self.fit_moments < 2 {
            return invalid(format!("fit-moments = {} must be at least 2", self.fit_moments));
        }
        if let Some(p) = self.eval_points.iter().find(|p| !(p.value().norm() < 1.0)) {
            return invalid(format!("eval point {} must lie in the open unit disk", p.value()));
        }
        Ok(())
    }
}
