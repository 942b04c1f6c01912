//! Pull-back of the Poincaré metric under a disk map and the distance
//! ratio comparing it with the Poincaré metric itself.
//!
//! For a self-map `f` of the disk,
//!
//! ```text
//! σ_f(z) = 2 |f'(z)| / (1 - |f(z)|^2)
//! R_f(z) = (1 - |z|^2) σ_f(z) / 2
//! ```
//!
//! `log σ_f` satisfies `Δ log σ_f = σ_f^2` away from the critical points of
//! `f` (the pulled-back metric has curvature -1), `R_f ≤ 1` with equality
//! only for automorphisms, `R_{f∘g} = (R_f ∘ g) R_g`, `R_f` vanishes to
//! order `m - 1` at a critical point of local degree `m`, and `R_f → 1` at
//! the unit circle.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::{extended, forward_phi, BlaschkeProduct, DiskMap, DiskPoint, Error, Result};

/// Pull-back density and distance ratio at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub z: Complex64,
    pub sigma: f64,
    pub ratio: f64,
}

impl MetricSample {
    pub fn at(f: &impl DiskMap, z: Complex64) -> Self {
        MetricSample {
            z,
            sigma: sigma_eval(f, z),
            ratio: distance_ratio(f, z),
        }
    }
}

/// `2 |f'(z)| / (1 - |f(z)|^2)`, for `|z| < 1`.
pub fn sigma_eval(f: &impl DiskMap, z: Complex64) -> f64 {
    2.0 * f.derivative(z).norm() / f.one_minus_abs_sq(z)
}

/// `(1 - |z|^2) |f'(z)| / (1 - |f(z)|^2)`, for `|z| < 1`.
pub fn distance_ratio(f: &impl DiskMap, z: Complex64) -> f64 {
    (1.0 - z.norm_sqr()) * f.derivative(z).norm() / f.one_minus_abs_sq(z)
}

/// `(R_{f∘g}(z), R_f(g(z)) R_g(z))`, with `f∘g` evaluated as a composition.
pub fn composition_check(f: &impl DiskMap, g: &impl DiskMap, z: Complex64) -> (f64, f64) {
    let composed = crate::Composed::new(f, g);
    let lhs = distance_ratio(&composed, z);
    let rhs = distance_ratio(f, g.eval(z)) * distance_ratio(g, z);
    (lhs, rhs)
}

const ORDER_RADII: [f64; 3] = [1e-3, 1e-4, 1e-5];
const ORDER_ANGLES: usize = 64;
const CRITICAL_TOL: f64 = 1e-9;

/// Order `m - 1` to which `R_f` vanishes at a critical point `c` of local
/// degree `m`.
///
/// The slope of `log R_f` against `log r` is fitted over circles of radius
/// `1e-3, 1e-4, 1e-5` around `c`. On each circle `log R_f` is averaged over
/// the angle; for a cluster of nearby critical points inside the circle the
/// average of `log |z - c_i|` is exactly `log r`, so a slightly split
/// multiple critical point still gives an integral slope. `f'` is evaluated
/// in double-double: at `1e-5` from a triple critical point it is of order
/// `1e-15`, below the f64 rounding of the product rule.
pub fn vanishing_order(f: &BlaschkeProduct, c: DiskPoint) -> Result<u32> {
    let zeros: Vec<Complex64> = f.zeros().values().collect();
    let derivative = extended::blaschke_derivative(&zeros, c.value()).norm();
    if derivative > CRITICAL_TOL {
        return Err(Error::NotCritical { derivative });
    }
    let ratio = |z: Complex64| {
        (1.0 - z.norm_sqr()) * extended::blaschke_derivative(&zeros, z).norm()
            / f.one_minus_abs_sq(z)
    };
    let points: Vec<(f64, f64)> = ORDER_RADII
        .iter()
        .map(|&r| {
            let mean = (0..ORDER_ANGLES)
                .map(|k| {
                    let z =
                        c.value() + Complex64::from_polar(r, TAU * k as f64 / ORDER_ANGLES as f64);
                    libm::log(ratio(z))
                })
                .sum::<f64>()
                / ORDER_ANGLES as f64;
            (libm::log(r), mean)
        })
        .collect();
    let slope = least_squares_slope(&points);
    let nearest = libm::round(slope);
    if !slope.is_finite() || (slope - nearest).abs() > 0.05 || nearest < 0.0 {
        return Err(Error::SlopeAmbiguous { slope });
    }
    Ok(nearest as u32)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Outcome of a curvature scan on a square lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub grid_spacing: f64,
    /// Largest `|Δ_h log σ_f / σ_f^2 - 1|`, the deviation of the discrete
    /// curvature from -1.
    pub max_residual: f64,
    /// Largest `|Δ_h log σ_f - σ_f^2|`.
    pub max_abs_residual: f64,
    pub points_checked: usize,
    pub excluded_radius: f64,
}

/// Lattice and stencil for [`curvature_residual_on`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureGrid {
    /// Stencil step `h` of the five-point Laplacian.
    pub spacing: f64,
    /// Lattice points closer than this to a critical point, or with
    /// `|z| ≥ 1 - excluded_radius`, are skipped.
    pub excluded_radius: f64,
    /// Pitch of the lattice of sample points (multiples of it along both axes).
    pub lattice_pitch: f64,
    /// Sample points satisfy `|z| ≤ radius`.
    pub radius: f64,
}

impl CurvatureGrid {
    /// Lattice pitch equal to the stencil step, exclusion `10 h`, `|z| ≤ 0.9`.
    pub fn standard(spacing: f64) -> Self {
        CurvatureGrid {
            spacing,
            excluded_radius: 10.0 * spacing,
            lattice_pitch: spacing,
            radius: 0.9,
        }
    }

    /// Grids for a refinement study: the same sample points and exclusion
    /// zone for every stencil step, taken from the coarsest step.
    pub fn refinement(spacings: &[f64]) -> Vec<Self> {
        let coarse = spacings.iter().copied().fold(0.0, f64::max);
        spacings
            .iter()
            .map(|&h| CurvatureGrid {
                spacing: h,
                excluded_radius: 10.0 * coarse,
                lattice_pitch: coarse,
                radius: 0.9,
            })
            .collect()
    }
}

/// Five-point discrete Laplacian of `log σ_f` against `σ_f^2` on the
/// standard grid for `spacing` (`1e-4 ≤ spacing ≤ 1e-2`).
pub fn curvature_residual(f: &BlaschkeProduct, spacing: f64) -> Result<CurvatureReport> {
    if !(1e-4..=1e-2).contains(&spacing) {
        return Err(Error::InvalidArgument(
            "curvature spacing outside [1e-4, 1e-2]",
        ));
    }
    curvature_residual_on(f, &CurvatureGrid::standard(spacing))
}

pub fn curvature_residual_on(f: &BlaschkeProduct, grid: &CurvatureGrid) -> Result<CurvatureReport> {
    let critical: Vec<Complex64> = if f.zero_count() == 0 {
        Vec::new()
    } else {
        forward_phi(f.zeros())?.critical_points.values().collect()
    };
    let h = grid.spacing;
    let log_sigma = |z: Complex64| libm::log(sigma_eval(f, z));
    let steps = libm::floor(grid.radius / grid.lattice_pitch) as i64;
    let outer = grid.radius.min(1.0 - grid.excluded_radius);

    let mut report = CurvatureReport {
        grid_spacing: h,
        max_residual: 0.0,
        max_abs_residual: 0.0,
        points_checked: 0,
        excluded_radius: grid.excluded_radius,
    };
    for i in -steps..=steps {
        for j in -steps..=steps {
            let z = Complex64::new(i as f64, j as f64) * grid.lattice_pitch;
            if z.norm() > outer
                || critical
                    .iter()
                    .any(|c| (z - c).norm() <= grid.excluded_radius)
            {
                continue;
            }
            let center = log_sigma(z);
            let neighbours = log_sigma(z + h)
                + log_sigma(z - h)
                + log_sigma(z + Complex64::new(0.0, h))
                + log_sigma(z - Complex64::new(0.0, h));
            let laplacian = (neighbours - 4.0 * center) / (h * h);
            let sigma = sigma_eval(f, z);
            let sigma_sq = sigma * sigma;
            report.max_abs_residual = report.max_abs_residual.max((laplacian - sigma_sq).abs());
            report.max_residual = report.max_residual.max((laplacian / sigma_sq - 1.0).abs());
            report.points_checked += 1;
        }
    }
    Ok(report)
}

/// For each radius, `max_θ |R_f(r e^{iθ}) - 1|` over `angles` equally
/// spaced angles. Radii must increase and stay below 1.
pub fn boundary_limit_scan(f: &impl DiskMap, radii: &[f64], angles: usize) -> Result<Vec<f64>> {
    if angles == 0 {
        return Err(Error::InvalidArgument("angle count must be positive"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::InvalidArgument("radii must increase within [0, 1)"));
    }
    Ok(radii
        .iter()
        .map(|&r| {
            (0..angles)
                .map(|k| {
                    let z = Complex64::from_polar(r, TAU * k as f64 / angles as f64);
                    (distance_ratio(f, z) - 1.0).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect())
}
