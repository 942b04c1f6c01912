use std::time::Instant;

use blaschke_core::{forward_phi, hyperbolic_match_distance, invert_phi, Error, SolverReport};
use thiserror::Error;

use crate::document::{
    self, pairs, Diagnostics, DocumentError, Mode, ProblemDocument, ResultDocument,
};
use crate::exit;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Invalid(#[from] DocumentError),
    /// Forward classification failed (a root too close to the circle, or a
    /// wrong interior count).
    #[error("forward map failed: {0}")]
    Forward(Error),
    /// The solver stopped early; the document holds its last state.
    #[error("continuation stopped at t = {t_reached}")]
    NotConverged {
        document: Box<ResultDocument>,
        t_reached: f64,
    },
    #[error("solver failed: {0}")]
    Solver(Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Invalid(_) => exit::INVALID_INPUT,
            CommandError::Forward(_) => exit::INDECISIVE,
            CommandError::NotConverged { .. } | CommandError::Solver(_) => exit::NOT_CONVERGED,
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Critical points of the product with the document's zeros.
pub fn cmd_forward(input: &ProblemDocument) -> Result<ResultDocument, CommandError> {
    let start = Instant::now();
    input.expect_mode(Mode::Forward)?;
    let zeros = input.multiset()?;
    if zeros.is_empty() {
        return Ok(ResultDocument {
            version: document::VERSION.to_owned(),
            mode: Mode::Forward,
            input_points: Vec::new(),
            output_points: Vec::new(),
            residual: 0.0,
            diagnostics: Diagnostics {
                steps_taken: 0,
                step_rejections: 0,
                runtime_ms: elapsed_ms(start),
            },
            converged: true,
        });
    }
    let out = forward_phi(&zeros).map_err(CommandError::Forward)?;
    Ok(ResultDocument {
        version: document::VERSION.to_owned(),
        mode: Mode::Forward,
        input_points: input.points.clone(),
        output_points: pairs(&out.critical_points),
        residual: out.max_residual(),
        diagnostics: Diagnostics {
            steps_taken: 0,
            step_rejections: 0,
            runtime_ms: elapsed_ms(start),
        },
        converged: true,
    })
}

/// Command-line overrides for `invert`, applied after the document's own.
#[derive(Debug, Clone, Copy, Default)]
pub struct InvertOptions {
    pub step: Option<f64>,
    pub tol: Option<f64>,
}

/// Zeros of the normalized product with the document's critical points.
pub fn cmd_invert(
    input: &ProblemDocument,
    options: InvertOptions,
) -> Result<ResultDocument, CommandError> {
    let start = Instant::now();
    input.expect_mode(Mode::Invert)?;
    let target = input.multiset()?;
    let mut config = input.solver_config()?;
    if let Some(step) = options.step {
        config.initial_step = step;
    }
    if let Some(tol) = options.tol {
        config.corrector_tol = tol;
    }
    document::validate_config(&config)?;

    let document = |report: &SolverReport, residual: f64| ResultDocument {
        version: document::VERSION.to_owned(),
        mode: Mode::Invert,
        input_points: input.points.clone(),
        output_points: pairs(&report.zeros),
        residual,
        diagnostics: Diagnostics {
            steps_taken: report.steps_taken,
            step_rejections: report.step_rejections,
            runtime_ms: elapsed_ms(start),
        },
        converged: report.converged,
    };

    if target.is_empty() {
        return Ok(ResultDocument {
            converged: true,
            ..document(&empty_report(), 0.0)
        });
    }
    match invert_phi(&target, &config) {
        Ok(report) if report.converged => {
            let image = forward_phi(&report.zeros).map_err(CommandError::Forward)?;
            let residual = hyperbolic_match_distance(&image.critical_points, &target)
                .map_err(CommandError::Solver)?;
            Ok(document(&report, residual))
        }
        Ok(report) => Err(CommandError::NotConverged {
            t_reached: report.t_reached,
            document: Box::new(document(&report, report.residual)),
        }),
        Err(Error::StepUnderflow(report)) => Err(CommandError::NotConverged {
            t_reached: report.t_reached,
            document: Box::new(ResultDocument {
                converged: false,
                ..document(&report, report.residual)
            }),
        }),
        Err(e) => Err(CommandError::Solver(e)),
    }
}

fn empty_report() -> SolverReport {
    SolverReport {
        zeros: blaschke_core::PointMultiset::empty(),
        residual: 0.0,
        steps_taken: 0,
        step_rejections: 0,
        converged: true,
        t_reached: 1.0,
    }
}
