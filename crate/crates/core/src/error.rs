use alloc::boxed::Box;

use crate::inverse::SolverReport;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("point is not on the unit circle (|z| = {modulus})")]
    OffCircle { modulus: f64 },

    #[error("polynomial of degree 0 has no roots")]
    ConstantPolynomial,

    #[error("root finder did not converge after {iterations} iterations")]
    RootFinderStalled { iterations: usize },

    #[error("root {re} + {im}i lies too close to the unit circle to classify")]
    IndecisiveRoot { re: f64, im: f64 },

    #[error("expected {expected} interior critical points, found {found}")]
    CriticalCount { expected: usize, found: usize },

    #[error("multisets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("empty input")]
    Empty,

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("jacobian is numerically singular (inverse condition {rcond:e})")]
    JacobianSingular { rcond: f64 },

    #[error("newton corrector failed to reach the tolerance (residual {residual:e})")]
    NewtonDiverged { residual: f64 },

    #[error("a zero reached modulus {modulus} beyond the boundary guard")]
    BoundaryEscape { modulus: f64 },

    #[error("continuation step fell below the minimum at t = {}", .0.t_reached)]
    StepUnderflow(Box<SolverReport>),

    #[error("point is not a critical point (|f'(c)| = {derivative:e})")]
    NotCritical { derivative: f64 },

    #[error("log-log slope {slope} is not within 0.05 of an integer")]
    SlopeAmbiguous { slope: f64 },
}
