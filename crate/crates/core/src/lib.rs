//! Normalized finite Blaschke products on the unit disk and the map that
//! sends their zero set to their critical set.
//!
//! A normalized product of degree `d + 1` is
//!
//! ```text
//! f(z) = z * prod_j  (1 - conj(a_j)) / (1 - a_j) * (z - a_j) / (1 - conj(a_j) z)
//! ```
//!
//! with `|a_j| < 1`, so that `f(0) = 0` and `f(1) = 1`. Its `d` critical
//! points in the disk determine it uniquely. [`forward_phi`] computes the
//! critical set from the zero set and [`invert_phi`] recovers the zero set
//! from a prescribed critical set by homotopy continuation. The [`metrics`]
//! module checks hyperbolic-metric identities numerically.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod disk;
mod error;
mod extended;
mod matching;
mod multiset;

pub mod critical;
pub mod inverse;
pub mod metrics;
pub mod poly;

pub use num_complex::Complex64;

pub use critical::{critical_polynomial, forward_phi, multiplicity_profile, CriticalResult};
pub use disk::{
    beta_eval, degeneration_limit, log_derivative_on_circle, BlaschkeProduct, Composed,
    DiskAutomorphism, DiskMap, DiskPoint, Identity, BOUNDARY_TOLERANCE,
};
pub use error::Error;
pub use inverse::{
    invert_phi, invert_phi_with, newton_correct, numerical_jacobian, phi_residual, to_symmetric,
    ContinuationState, SolverConfig, SolverReport, SymmetricCoordinates,
};
pub use matching::{hyperbolic_distance, hyperbolic_match_distance, min_cost_assignment};
pub use metrics::{
    boundary_limit_scan, composition_check, curvature_residual, curvature_residual_on,
    distance_ratio, sigma_eval, vanishing_order, CurvatureGrid, CurvatureReport, MetricSample,
};
pub use multiset::PointMultiset;
pub use poly::ComplexPolynomial;

pub type Result<T, E = Error> = core::result::Result<T, E>;
