use blaschke_core::{Complex64, PointMultiset, SolverConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Forward,
    Invert,
}

/// Solver settings a document may override; absent fields keep their
/// defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrector_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_newton_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_guard: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

impl ConfigOverrides {
    pub fn apply(&self, base: SolverConfig) -> SolverConfig {
        SolverConfig {
            initial_step: self.initial_step.unwrap_or(base.initial_step),
            min_step: self.min_step.unwrap_or(base.min_step),
            max_step: self.max_step.unwrap_or(base.max_step),
            corrector_tol: self.corrector_tol.unwrap_or(base.corrector_tol),
            max_newton_iters: self.max_newton_iters.unwrap_or(base.max_newton_iters),
            boundary_guard: self.boundary_guard.unwrap_or(base.boundary_guard),
            fd_step: self.fd_step.unwrap_or(base.fd_step),
        }
    }
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unsupported document version {0:?} (expected {VERSION:?})")]
    Version(String),
    #[error("point {index} is invalid: {source}")]
    Point {
        index: usize,
        source: blaschke_core::Error,
    },
    #[error("document mode is {found:?}, this command needs {expected:?}")]
    Mode { expected: Mode, found: Mode },
    #[error("invalid solver configuration: {0}")]
    Config(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub version: String,
    pub mode: Mode,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigOverrides>,
}

impl ProblemDocument {
    pub fn new(mode: Mode, points: Vec<[f64; 2]>) -> Self {
        ProblemDocument {
            version: VERSION.to_owned(),
            mode,
            points,
            config: None,
        }
    }

    /// Parses and checks the version; points are checked by [`Self::multiset`].
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: ProblemDocument = serde_json::from_str(text)?;
        if doc.version != VERSION {
            return Err(DocumentError::Version(doc.version));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn multiset(&self) -> Result<PointMultiset, DocumentError> {
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(index, &[re, im])| {
                blaschke_core::DiskPoint::new(re, im)
                    .map_err(|source| DocumentError::Point { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PointMultiset::new(points))
    }

    pub fn expect_mode(&self, expected: Mode) -> Result<(), DocumentError> {
        if self.mode != expected {
            return Err(DocumentError::Mode {
                expected,
                found: self.mode,
            });
        }
        Ok(())
    }

    pub fn solver_config(&self) -> Result<SolverConfig, DocumentError> {
        let config = self
            .config
            .unwrap_or_default()
            .apply(SolverConfig::default());
        validate_config(&config)?;
        Ok(config)
    }
}

pub(crate) fn validate_config(c: &SolverConfig) -> Result<(), DocumentError> {
    let positive = [
        c.initial_step,
        c.min_step,
        c.max_step,
        c.corrector_tol,
        c.fd_step,
    ];
    if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(DocumentError::Config(
            "step sizes and tolerances must be positive",
        ));
    }
    if c.min_step > c.max_step || c.initial_step > 1.0 {
        return Err(DocumentError::Config(
            "need min_step <= max_step and initial_step <= 1",
        ));
    }
    if !(0.0..1.0).contains(&c.boundary_guard) {
        return Err(DocumentError::Config("boundary_guard must lie in [0, 1)"));
    }
    if c.max_newton_iters == 0 {
        return Err(DocumentError::Config("max_newton_iters must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps_taken: usize,
    pub step_rejections: usize,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    pub mode: Mode,
    pub input_points: Vec<[f64; 2]>,
    /// Canonical order.
    pub output_points: Vec<[f64; 2]>,
    pub residual: f64,
    pub diagnostics: Diagnostics,
    pub converged: bool,
}

impl ResultDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// A problem of the given mode whose points are this result's output.
    pub fn chain(&self, mode: Mode) -> ProblemDocument {
        ProblemDocument::new(mode, self.output_points.clone())
    }
}

pub fn pairs(points: &PointMultiset) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.re(), p.im()]).collect()
}

pub fn complex_pairs(points: &[Complex64]) -> Vec<[f64; 2]> {
    points.iter().map(|z| [z.re, z.im]).collect()
}
