//! Recovering the zero set from a prescribed critical set.
//!
//! Both multisets are handled through their elementary symmetric functions,
//! which are smooth coordinates on unordered tuples of points. Writing `E(x)`
//! for the symmetric coordinates of the critical set of the product whose
//! zeros have symmetric coordinates `x`, the solver tracks `E(x(t)) = e(t c*)`
//! from `t = 0`, where `x = 0` (all zeros at the origin, `f = z^{d+1}`), to
//! `t = 1` with an Euler predictor and a damped Newton corrector. The
//! Jacobian of `E` is taken by central finite differences in the `2d` real
//! coordinates.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::critical::interior_critical_coords;
use crate::extended;
use crate::{ComplexPolynomial, Error, PointMultiset, Result};

/// Inverse condition number below which the Jacobian counts as singular.
const SINGULAR_RCOND: f64 = 1e-12;
/// Predicted points with a larger residual are rejected before correction.
const PREDICTOR_TOL: f64 = 1e-2;
const MAX_HALVINGS: usize = 8;
const GROWTH: f64 = 1.5;
const ACCEPTS_BEFORE_GROWTH: usize = 3;
/// Extra Newton iterations at `t = 1`, taken while each one at least halves
/// the residual.
const MAX_POLISH_ITERS: usize = 4;

/// Elementary symmetric functions `e_1, …, e_d` of a point multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCoordinates(Vec<Complex64>);

impl SymmetricCoordinates {
    pub fn new(values: Vec<Complex64>) -> Self {
        SymmetricCoordinates(values)
    }

    pub fn zero(d: usize) -> Self {
        SymmetricCoordinates(vec![Complex64::new(0.0, 0.0); d])
    }

    /// Vieta: the coefficients of `Π (z - p)` with alternating signs.
    pub fn from_points(points: impl IntoIterator<Item = Complex64>) -> Self {
        // e[k] holds e_k; e[0] = 1
        let mut e = vec![Complex64::new(1.0, 0.0)];
        for p in points {
            e.push(Complex64::new(0.0, 0.0));
            for k in (1..e.len()).rev() {
                let prev = e[k - 1];
                e[k] += prev * p;
            }
        }
        e.remove(0);
        SymmetricCoordinates(e)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Interleaved `(re, im)` pairs.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(x: &[f64]) -> Self {
        SymmetricCoordinates(
            x.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    }

    /// Symmetric coordinates of the dilated multiset `{t p}`: `e_k ↦ t^k e_k`.
    pub fn dilate(&self, t: f64) -> Self {
        let mut scale = 1.0;
        SymmetricCoordinates(
            self.0
                .iter()
                .map(|&e| {
                    scale *= t;
                    e * scale
                })
                .collect(),
        )
    }

    /// The monic polynomial `Σ (-1)^k e_k z^{d-k}` whose roots are the points.
    pub fn polynomial(&self) -> ComplexPolynomial {
        let d = self.0.len();
        let mut c = vec![Complex64::new(0.0, 0.0); d + 1];
        c[d] = Complex64::new(1.0, 0.0);
        for (k, &e) in self.0.iter().enumerate() {
            let k = k + 1;
            c[d - k] = if k % 2 == 0 { e } else { -e };
        }
        ComplexPolynomial::new(c)
    }

    /// The point multiset with these coordinates; fails if a point is not
    /// strictly inside the disk.
    pub fn points(&self) -> Result<PointMultiset> {
        if self.0.is_empty() {
            return Ok(PointMultiset::empty());
        }
        PointMultiset::from_complex(self.polynomial().find_roots()?)
    }
}

pub fn to_symmetric(points: &PointMultiset) -> SymmetricCoordinates {
    SymmetricCoordinates::from_points(points.values())
}

/// Symmetric coordinates of the critical set of the product whose zeros
/// have coordinates `zeros`.
pub(crate) fn critical_coords(zeros: &SymmetricCoordinates) -> Result<SymmetricCoordinates> {
    interior_critical_coords(zeros)
}

fn residual_vector(
    zeros: &SymmetricCoordinates,
    target: &SymmetricCoordinates,
) -> Result<Vec<f64>> {
    let image = critical_coords(zeros)?;
    Ok(image
        .0
        .iter()
        .zip(&target.0)
        .flat_map(|(a, b)| {
            let d = a - b;
            [d.re, d.im]
        })
        .collect())
}

/// Interleaved real and imaginary parts of `e(Φ(zeros)) - target`.
pub fn phi_residual(zeros: &PointMultiset, target: &SymmetricCoordinates) -> Result<Vec<f64>> {
    if zeros.len() != target.len() {
        return Err(Error::SizeMismatch {
            left: zeros.len(),
            right: target.len(),
        });
    }
    residual_vector(&to_symmetric(zeros), target)
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Central differences of the critical coordinates with respect to the `2d`
/// real coordinates `(re e_1, im e_1, …)` of the zero multiset.
fn jacobian_at(zeros: &SymmetricCoordinates, h: f64) -> Result<DMatrix<f64>> {
    let x = zeros.to_real();
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = x.clone();
    for j in 0..n {
        probe[j] = x[j] + h;
        let plus = critical_coords(&SymmetricCoordinates::from_real(&probe))?.to_real();
        probe[j] = x[j] - h;
        let minus = critical_coords(&SymmetricCoordinates::from_real(&probe))?.to_real();
        probe[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn inverse_condition(jac: &DMatrix<f64>) -> f64 {
    let sv = jac.clone().singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// Finite-difference Jacobian of the critical map at `zeros`, in symmetric
/// coordinates on both sides.
///
/// `h` must lie in `[1e-8, 1e-4]` and the zeros must stay more than `10 h`
/// inside the unit circle.
pub fn numerical_jacobian(zeros: &PointMultiset, h: f64) -> Result<DMatrix<f64>> {
    if !(1e-8..=1e-4).contains(&h) {
        return Err(Error::InvalidArgument(
            "finite-difference step outside [1e-8, 1e-4]",
        ));
    }
    if zeros.is_empty() {
        return Err(Error::Empty);
    }
    if zeros.max_modulus() >= 1.0 - 10.0 * h {
        return Err(Error::InvalidArgument(
            "zeros within 10 h of the unit circle",
        ));
    }
    let jac = jacobian_at(&to_symmetric(zeros), h)?;
    let rcond = inverse_condition(&jac);
    if rcond < SINGULAR_RCOND {
        return Err(Error::JacobianSingular { rcond });
    }
    Ok(jac)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub corrector_tol: f64,
    pub max_newton_iters: usize,
    /// Zeros must keep modulus below `1 - boundary_guard`.
    pub boundary_guard: f64,
    pub fd_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            initial_step: 0.1,
            min_step: 1e-6,
            max_step: 0.25,
            corrector_tol: 1e-10,
            max_newton_iters: 25,
            boundary_guard: 1e-6,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationState {
    pub t: f64,
    pub zeros: PointMultiset,
    pub coords: SymmetricCoordinates,
    pub step: f64,
    pub newton_iters: usize,
    pub max_zero_modulus: f64,
}

impl ContinuationState {
    /// `t = 0`: every zero at the origin.
    pub fn start(d: usize, step: f64) -> Self {
        ContinuationState {
            t: 0.0,
            zeros: PointMultiset::origin(d),
            coords: SymmetricCoordinates::zero(d),
            step,
            newton_iters: 0,
            max_zero_modulus: 0.0,
        }
    }

    pub fn from_zeros(zeros: PointMultiset, t: f64, step: f64) -> Self {
        ContinuationState {
            t,
            coords: to_symmetric(&zeros),
            max_zero_modulus: zeros.max_modulus(),
            zeros,
            step,
            newton_iters: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub zeros: PointMultiset,
    /// Euclidean norm of the symmetric-coordinate mismatch.
    pub residual: f64,
    pub steps_taken: usize,
    pub step_rejections: usize,
    pub converged: bool,
    /// Homotopy parameter of the last accepted state.
    pub t_reached: f64,
}

struct Corrected {
    coords: SymmetricCoordinates,
    zeros: PointMultiset,
    residual: f64,
    iterations: usize,
    jacobian: Option<DMatrix<f64>>,
}

/// Zeros for the given coordinates, provided they respect the guard.
fn guarded_zeros(coords: &SymmetricCoordinates, guard: f64) -> Result<PointMultiset> {
    let zeros = coords.points().map_err(|e| match e {
        Error::OutsideDisk { re, im } => Error::BoundaryEscape {
            modulus: libm::hypot(re, im),
        },
        other => other,
    })?;
    let modulus = zeros.max_modulus();
    if modulus >= 1.0 - guard {
        return Err(Error::BoundaryEscape { modulus });
    }
    Ok(zeros)
}

fn effective_fd_step(config: &SolverConfig, zeros: &PointMultiset) -> f64 {
    config.fd_step.min((1.0 - zeros.max_modulus()) / 10.0)
}

fn solve(jac: &DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let rcond = inverse_condition(jac);
    if rcond < SINGULAR_RCOND {
        return Err(Error::JacobianSingular { rcond });
    }
    let lu = jac.clone().lu();
    let b = DVector::from_column_slice(rhs);
    lu.solve(&b)
        .map(|x| x.as_slice().to_vec())
        .ok_or(Error::JacobianSingular { rcond })
}

/// Damped Newton on `E(x) = target`.
fn correct(
    coords: SymmetricCoordinates,
    zeros: PointMultiset,
    target: &SymmetricCoordinates,
    config: &SolverConfig,
    polish: bool,
) -> Result<Corrected> {
    let mut x = coords;
    let mut zeros = zeros;
    let mut f = residual_vector(&x, target)?;
    let mut r = norm(&f);
    let mut jacobian = None;
    let mut iterations = 0;
    let mut polish_left = if polish { MAX_POLISH_ITERS } else { 0 };

    loop {
        if r <= config.corrector_tol {
            if polish_left == 0 || r == 0.0 {
                break;
            }
            polish_left -= 1;
        } else if iterations == config.max_newton_iters {
            return Err(Error::NewtonDiverged { residual: r });
        }
        let h = effective_fd_step(config, &zeros);
        let jac = jacobian_at(&x, h)?;
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let delta = solve(&jac, &neg)?;
        jacobian = Some(jac);
        iterations += 1;

        let base = x.to_real();
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut last_failure = Error::NewtonDiverged { residual: r };
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = base
                .iter()
                .zip(&delta)
                .map(|(b, d)| b + lambda * d)
                .collect();
            let trial = SymmetricCoordinates::from_real(&trial);
            let attempt = guarded_zeros(&trial, config.boundary_guard).and_then(|z| {
                let ft = residual_vector(&trial, target)?;
                Ok((z, ft))
            });
            match attempt {
                Ok((z, ft)) if norm(&ft) < r => {
                    accepted = Some((trial, z, ft));
                    break;
                }
                Ok((_, ft)) => {
                    last_failure = Error::NewtonDiverged {
                        residual: norm(&ft),
                    }
                }
                Err(e @ Error::BoundaryEscape { .. }) => last_failure = e,
                Err(_) => {}
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((nx, nz, nf)) => {
                let nr = norm(&nf);
                let stalled = r <= config.corrector_tol && nr > 0.5 * r;
                x = nx;
                zeros = nz;
                f = nf;
                r = nr;
                if stalled {
                    break;
                }
            }
            None if r <= config.corrector_tol => break,
            None => {
                return Err(match last_failure {
                    Error::BoundaryEscape { modulus } => Error::BoundaryEscape { modulus },
                    _ => Error::NewtonDiverged { residual: r },
                })
            }
        }
    }
    Ok(Corrected {
        coords: x,
        zeros,
        residual: r,
        iterations,
        jacobian,
    })
}

/// Runs the damped Newton corrector from `state` toward the zero set whose
/// critical coordinates are `target`.
pub fn newton_correct(
    state: &ContinuationState,
    target: &SymmetricCoordinates,
    config: &SolverConfig,
) -> Result<ContinuationState> {
    if state.coords.len() != target.len() {
        return Err(Error::SizeMismatch {
            left: state.coords.len(),
            right: target.len(),
        });
    }
    let out = correct(
        state.coords.clone(),
        state.zeros.clone(),
        target,
        config,
        false,
    )?;
    Ok(ContinuationState {
        t: state.t,
        max_zero_modulus: out.zeros.max_modulus(),
        zeros: out.zeros,
        coords: out.coords,
        step: state.step,
        newton_iters: out.iterations,
    })
}

/// The normalized product's zero set whose critical set is `target`.
pub fn invert_phi(target: &PointMultiset, config: &SolverConfig) -> Result<SolverReport> {
    invert_phi_with(target, config, |_| {})
}

/// [`invert_phi`] with a hook applied to every predictor increment (in
/// interleaved real symmetric coordinates) before correction.
pub fn invert_phi_with(
    target: &PointMultiset,
    config: &SolverConfig,
    mut perturb_predictor: impl FnMut(&mut [f64]),
) -> Result<SolverReport> {
    let d = target.len();
    if d == 0 {
        return Err(Error::Empty);
    }
    let goal = to_symmetric(target);
    let target_at = |t: f64| {
        debug_assert!(target.iter().all(|c| c.modulus() * t < 1.0));
        goal.dilate(t)
    };

    let mut coords = SymmetricCoordinates::zero(d);
    let mut zeros = PointMultiset::origin(d);
    let mut t = 0.0;
    let mut residual = 0.0;
    let mut step = config.initial_step.min(config.max_step);
    let mut jacobian = jacobian_at(&coords, config.fd_step).ok();
    let (mut steps_taken, mut step_rejections, mut streak) = (0, 0, 0);

    let report = |zeros: &PointMultiset, residual, steps_taken, step_rejections, t, converged| {
        SolverReport {
            zeros: zeros.clone(),
            residual,
            steps_taken,
            step_rejections,
            converged,
            t_reached: t,
        }
    };

    while t < 1.0 {
        if step < config.min_step {
            return Err(Error::StepUnderflow(Box::new(report(
                &zeros,
                residual,
                steps_taken,
                step_rejections,
                t,
                false,
            ))));
        }
        let t_next = (t + step).min(1.0);
        let goal_next = target_at(t_next);

        let mut increment = vec![0.0; 2 * d];
        if let Some(jac) = &jacobian {
            let shift: Vec<f64> = {
                let now = target_at(t).to_real();
                goal_next
                    .to_real()
                    .iter()
                    .zip(&now)
                    .map(|(a, b)| a - b)
                    .collect()
            };
            if let Ok(dx) = solve(jac, &shift) {
                increment = dx;
            }
        }
        perturb_predictor(&mut increment);
        let predicted: Vec<f64> = coords
            .to_real()
            .iter()
            .zip(&increment)
            .map(|(x, dx)| x + dx)
            .collect();
        let predicted = SymmetricCoordinates::from_real(&predicted);

        let attempt = guarded_zeros(&predicted, config.boundary_guard).and_then(|z| {
            let r = norm(&residual_vector(&predicted, &goal_next)?);
            if r > PREDICTOR_TOL {
                return Err(Error::NewtonDiverged { residual: r });
            }
            correct(predicted.clone(), z, &goal_next, config, t_next >= 1.0)
        });

        match attempt {
            Ok(out) => {
                coords = out.coords;
                zeros = out.zeros;
                residual = out.residual;
                if out.jacobian.is_some() {
                    jacobian = out.jacobian;
                }
                t = t_next;
                steps_taken += 1;
                streak += 1;
                if streak >= ACCEPTS_BEFORE_GROWTH {
                    step = (step * GROWTH).min(config.max_step);
                    streak = 0;
                }
            }
            Err(_) => {
                step_rejections += 1;
                streak = 0;
                step *= 0.5;
            }
        }
    }

    if let Some((polished, r)) = polish(&zeros, target, &goal) {
        // The f64 residual is at its noise floor on both sides; the
        // extended remainder decides, this only guards against a bad step.
        if r <= config.corrector_tol.max(residual) {
            zeros = polished;
            residual = r;
        }
    }
    Ok(report(
        &zeros,
        residual,
        steps_taken,
        step_rejections,
        t,
        true,
    ))
}

/// Distinct zeros closer than this are left to the f64 solution.
const POLISH_SEPARATION: f64 = 1e-3;

/// Final correction of well separated zeros in extended precision. Past the
/// f64 floor of the corrector, a multiple critical point of the solution is
/// still split by roughly the cube root of the residual; this brings the
/// zeros to the nearest f64 values of the exact solution.
fn polish(
    zeros: &PointMultiset,
    target: &PointMultiset,
    goal: &SymmetricCoordinates,
) -> Option<(PointMultiset, f64)> {
    let values: Vec<Complex64> = zeros.values().collect();
    let separated = values.iter().enumerate().all(|(i, a)| {
        values[i + 1..]
            .iter()
            .all(|b| (a - b).norm() > POLISH_SEPARATION)
    });
    if !separated {
        return None;
    }
    let critical: Vec<Complex64> = target.values().collect();
    let polished = extended::polish_zeros(&values, &critical)?;
    let polished = PointMultiset::from_complex(polished).ok()?;
    let r = norm(&residual_vector(&to_symmetric(&polished), goal).ok()?);
    Some((polished, r))
}
