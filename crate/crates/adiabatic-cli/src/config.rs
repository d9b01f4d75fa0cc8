//! Sweep configuration: JSON schema, defaults, and validation.

use std::path::PathBuf;

use adiabatic::models::ModelConfig;
use adiabatic::propagator::ScheduleKind;
use serde::{Deserialize, Serialize};

use crate::table::Format;
use crate::CliError;

/// Raw sweep configuration as it appears in a JSON file. Optional fields
/// keep their absence observable so that re-serialising a parsed config
/// reproduces it exactly; defaults are applied by [`SweepConfig::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Model family description.
    pub model: ModelConfig,
    /// Explicit list of total times T (mutually exclusive with the range).
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<f64>>,
    /// Logarithmic range start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    /// Logarithmic range end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Number of logarithmically spaced points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Step schedule: "uniform" or "phi" (default: "phi" for the search
    /// family, "uniform" otherwise).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    /// Richardson tolerance of the adaptive product evolution (default 0.01).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    /// Oscillatory-quadrature tolerance for the C1/C2 columns (default 1e-6).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    /// Columns to compute: "error", "bounds", "first_order", "c1", "c2",
    /// "jrs" (default: error, bounds, first_order, jrs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    /// Output format: "csv" (default) or "json".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    /// Output path (stdout when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Worker threads for the sweep (0 or absent: automatic).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl SweepConfig {
    /// A configuration with only the model set.
    pub fn bare(model: ModelConfig) -> SweepConfig {
        SweepConfig {
            model,
            t_values: None,
            t_min: None,
            t_max: None,
            points: None,
            schedule: None,
            rel_tol: None,
            quad_tol: None,
            outputs: None,
            format: None,
            out: None,
            jobs: None,
        }
    }
}

/// Which sweep columns to compute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outputs {
    pub error: bool,
    pub bounds: bool,
    pub first_order: bool,
    pub c1: bool,
    pub c2: bool,
    pub jrs: bool,
}

impl Outputs {
    pub fn default_sweep() -> Outputs {
        Outputs { error: true, bounds: true, first_order: true, c1: false, c2: false, jrs: true }
    }

    /// Whether any column requires the bound report.
    pub fn needs_report(&self) -> bool {
        self.bounds || self.first_order || self.jrs
    }
}

/// A validated configuration with all defaults applied.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub model: ModelConfig,
    pub ts: Vec<f64>,
    pub schedule: ScheduleKind,
    pub rel_tol: f64,
    pub quad_tol: f64,
    pub outputs: Outputs,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

/// Parse a JSON sweep configuration. Syntax errors surface with the line
/// and column reported by the JSON parser.
pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Validate a configuration and fill in defaults. Every violation is
/// collected so one failing run reports them all.
///
/// `allow_zero_t` admits T = 0 (identity evolution), used by the plain
/// simulation command; bound columns require strictly positive T.
pub fn resolve(cfg: &SweepConfig, allow_zero_t: bool) -> Result<Resolved, CliError> {
    let mut violations = Vec::new();

    // The model must build; instantiate at a nominal T to surface problems
    // early (only the precessing family uses the value).
    if let Err(e) = cfg.model.build(1.0) {
        violations.push(format!("model: {e}"));
    }
    let is_search = cfg.model.model == "search";

    let ts = resolve_times(cfg, allow_zero_t, &mut violations);

    let schedule = match cfg.schedule.as_deref() {
        None => {
            if is_search {
                ScheduleKind::Phi
            } else {
                ScheduleKind::Uniform
            }
        }
        Some("uniform") => ScheduleKind::Uniform,
        Some("phi") => {
            if !is_search {
                violations.push(
                    "schedule: 'phi' needs closed-form level analytics, available only for the \
                     search family"
                        .to_string(),
                );
            }
            ScheduleKind::Phi
        }
        Some(other) => {
            violations.push(format!("schedule: expected 'uniform' or 'phi', got '{other}'"));
            ScheduleKind::Uniform
        }
    };

    let rel_tol = cfg.rel_tol.unwrap_or(0.01);
    if !(rel_tol > 0.0 && rel_tol <= 0.5) || !rel_tol.is_finite() {
        violations.push(format!("rel_tol: must lie in (0, 0.5], got {rel_tol}"));
    }
    let quad_tol = cfg.quad_tol.unwrap_or(1e-6);
    if !(quad_tol > 0.0 && quad_tol <= 1e-2) || !quad_tol.is_finite() {
        violations.push(format!("quad_tol: must lie in (0, 1e-2], got {quad_tol}"));
    }

    let outputs = match &cfg.outputs {
        None => Outputs::default_sweep(),
        Some(names) => {
            let mut outputs = Outputs::default();
            for name in names {
                match name.as_str() {
                    "error" => outputs.error = true,
                    "bounds" => outputs.bounds = true,
                    "first_order" => outputs.first_order = true,
                    "c1" => outputs.c1 = true,
                    "c2" => outputs.c2 = true,
                    "jrs" => outputs.jrs = true,
                    other => violations.push(format!(
                        "outputs: unknown column group '{other}' (expected error, bounds, \
                         first_order, c1, c2, or jrs)"
                    )),
                }
            }
            outputs
        }
    };

    let format = match cfg.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => {
            violations.push(format!("format: expected 'csv' or 'json', got '{other}'"));
            Format::Csv
        }
    };

    if violations.is_empty() {
        Ok(Resolved {
            model: cfg.model.clone(),
            ts,
            schedule,
            rel_tol,
            quad_tol,
            outputs,
            format,
            out: cfg.out.clone(),
            jobs: cfg.jobs.unwrap_or(0),
        })
    } else {
        Err(CliError::Validation(violations))
    }
}

/// Build the ascending T list from either the explicit list or the
/// logarithmic range, collecting violations.
fn resolve_times(cfg: &SweepConfig, allow_zero_t: bool, violations: &mut Vec<String>) -> Vec<f64> {
    let has_range = cfg.t_min.is_some() || cfg.t_max.is_some() || cfg.points.is_some();
    match (&cfg.t_values, has_range) {
        (Some(_), true) => {
            violations.push(
                "T: give either an explicit list or a t_min/t_max/points range, not both"
                    .to_string(),
            );
            Vec::new()
        }
        (Some(list), false) => {
            if list.is_empty() {
                violations.push("T: list must not be empty".to_string());
            }
            let floor_text = if allow_zero_t { "nonnegative" } else { "positive" };
            for &t in list {
                let ok = t.is_finite() && if allow_zero_t { t >= 0.0 } else { t > 0.0 };
                if !ok {
                    violations.push(format!("T: values must be finite and {floor_text}, got {t}"));
                }
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                violations.push("T: values must be strictly ascending".to_string());
            }
            list.clone()
        }
        (None, true) => {
            let (mut t_min, mut t_max, points) = (0.0, 0.0, cfg.points.unwrap_or(0));
            match (cfg.t_min, cfg.t_max, cfg.points) {
                (Some(lo), Some(hi), Some(n)) => {
                    t_min = lo;
                    t_max = hi;
                    if !(lo > 0.0) || !lo.is_finite() {
                        violations.push(format!("t_min: must be finite and positive, got {lo}"));
                    }
                    if !(hi >= lo) || !hi.is_finite() {
                        violations.push(format!("t_max: must be finite and at least t_min, got {hi}"));
                    }
                    if n < 1 {
                        violations.push("points: must be at least 1".to_string());
                    }
                }
                _ => violations.push(
                    "T range: t_min, t_max, and points must be given together".to_string(),
                ),
            }
            if !violations.is_empty() {
                return Vec::new();
            }
            log_range(t_min, t_max, points)
        }
        (None, false) => {
            violations.push("T: no values given (use a T list or t_min/t_max/points)".to_string());
            Vec::new()
        }
    }
}

/// Logarithmically spaced times from t_min to t_max inclusive.
fn log_range(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![t_min];
    }
    let ratio = (t_max / t_min).ln();
    (0..points)
        .map(|i| {
            if i == points - 1 {
                t_max
            } else {
                t_min * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}
