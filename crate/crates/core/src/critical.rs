//! The forward map from a zero multiset to the critical multiset.
//!
//! With `N(z) = z Π(z - a_j)` and `D(z) = Π(1 - conj(a_j) z)` the product is
//! `f = λ N / D`, so the critical points of `f` in the plane are the roots of
//! `C = N'D - ND'`. The `2d` roots of `C` are symmetric under `z ↦ 1/conj(z)`:
//! exactly `d` of them lie in the disk.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::inverse::SymmetricCoordinates;
use crate::poly::RootCluster;
use crate::{BlaschkeProduct, ComplexPolynomial, DiskMap, DiskPoint, Error, PointMultiset, Result};

/// Roots with `| |r| - 1 | < CLASSIFY_BAND` cannot be assigned to the
/// inside or the outside of the disk.
pub const CLASSIFY_BAND: f64 = 1e-7;

const RESIDUAL_BOUND: f64 = 1e-9;
const NEAR_CIRCLE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalResult {
    /// The `d` critical points inside the disk, numerically multiple roots
    /// reported as repeated copies of their centre.
    pub critical_points: PointMultiset,
    /// Roots of the critical polynomial outside the closed disk.
    pub reflected_partners: Vec<Complex64>,
    /// Number of partners at infinity (one per zero `a_j = 0`).
    pub partners_at_infinity: usize,
    /// `|f'(c)|` at each entry of `critical_points`.
    pub residuals: Vec<f64>,
}

impl CriticalResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// `N'D - ND'` built by exact convolution of the factors.
pub fn critical_polynomial(zeros: &PointMultiset) -> ComplexPolynomial {
    let coords = SymmetricCoordinates::from_points(zeros.values());
    critical_polynomial_from_coords(&coords)
}

/// `N = z P` and `D` read off directly from the elementary symmetric
/// functions `e_k` of the zeros: `P(z) = Σ (-1)^k e_k z^{d-k}` and
/// `D(z) = Σ (-1)^k conj(e_k) z^k`.
pub(crate) fn critical_polynomial_from_coords(coords: &SymmetricCoordinates) -> ComplexPolynomial {
    let d = coords.len();
    let signed = |k: usize, v: Complex64| if k.is_multiple_of(2) { v } else { -v };
    let e = |k: usize| {
        if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            coords.values()[k - 1]
        }
    };
    let mut numerator = alloc::vec![Complex64::new(0.0, 0.0); d + 2];
    for k in 0..=d {
        numerator[d + 1 - k] = signed(k, e(k));
    }
    let denominator: Vec<Complex64> = (0..=d).map(|k| signed(k, e(k).conj())).collect();
    let n = ComplexPolynomial::new(numerator);
    let dpoly = ComplexPolynomial::new(denominator);
    &n.derivative().mul(&dpoly) - &n.mul(&dpoly.derivative())
}

/// Raw classification of the roots of the critical polynomial.
pub(crate) struct CriticalRoots {
    pub poly: ComplexPolynomial,
    pub interior: Vec<Complex64>,
    pub exterior: Vec<Complex64>,
    pub at_infinity: usize,
}

pub(crate) fn classify_critical_roots(coords: &SymmetricCoordinates) -> Result<CriticalRoots> {
    let d = coords.len();
    let poly = critical_polynomial_from_coords(coords);
    let roots = poly.find_roots()?;
    let mut interior = Vec::with_capacity(d);
    let mut exterior = Vec::with_capacity(d);
    for r in roots {
        let m = r.norm();
        if m > 1.0 - CLASSIFY_BAND && m < 1.0 + CLASSIFY_BAND {
            return Err(Error::IndecisiveRoot { re: r.re, im: r.im });
        }
        if m < 1.0 {
            interior.push(r);
        } else {
            exterior.push(r);
        }
    }
    if interior.len() != d {
        return Err(Error::CriticalCount {
            expected: d,
            found: interior.len(),
        });
    }
    let at_infinity = 2 * d - poly.degree();
    Ok(CriticalRoots {
        poly,
        interior,
        exterior,
        at_infinity,
    })
}

const MIN_NODES: usize = 32;
const MAX_NODES: usize = 1 << 16;
/// Successive trapezoid sums agreeing this closely are squared-error
/// accurate: the error of `n` nodes decays like `ρ^n`.
const QUADRATURE_AGREEMENT: f64 = 1e-10;

/// Symmetric coordinates of the interior critical points, from the power
/// sums `p_k = (1/2πi) ∮ z^k C'(z)/C(z) dz` over the unit circle and
/// Newton's identities. Unlike the roots themselves, these depend smoothly
/// on the zeros through collisions of critical points.
pub(crate) fn interior_critical_coords(
    zeros: &SymmetricCoordinates,
) -> Result<SymmetricCoordinates> {
    let d = zeros.len();
    if zeros
        .values()
        .iter()
        .all(|e| *e == Complex64::new(0.0, 0.0))
    {
        return Ok(SymmetricCoordinates::zero(d));
    }
    let sums = trapezoid_power_sums(&LogDerivative::new(zeros), d)?;
    let count = sums[0].re;
    if (count - d as f64).abs() > 1e-6 || sums[0].im.abs() > 1e-6 {
        return Err(Error::CriticalCount {
            expected: d,
            found: libm::round(count.max(0.0)) as usize,
        });
    }
    // k e_k = Σ_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i
    let mut e = alloc::vec![Complex64::new(1.0, 0.0)];
    for k in 1..=d {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let term = e[k - i] * sums[i];
            acc += if i % 2 == 1 { term } else { -term };
        }
        e.push(acc / k as f64);
    }
    e.remove(0);
    Ok(SymmetricCoordinates::new(e))
}

/// `z C'(z) / C(z)` evaluated without forming `C`.
///
/// With `N = z P`, `g = f'/f = N'/N - D'/D` and `C = N D g`, so
/// `C'/C = N'/N + D'/D + g'/g`. Near zeros close to the circle `N'D` and
/// `ND'` are both tiny and their difference loses most of its digits; the
/// logarithmic derivatives do not. They are summed over the zeros when
/// these are well separated, and taken from `P`, `D` and their derivatives
/// otherwise.
enum LogDerivative {
    Zeros(Vec<Complex64>),
    Coefficients {
        p: [ComplexPolynomial; 3],
        q: [ComplexPolynomial; 3],
    },
}

/// Zeros closer than this are too poorly resolved for the summed form.
const SEPARATED: f64 = 1e-3;

impl LogDerivative {
    fn new(zeros: &SymmetricCoordinates) -> Self {
        let p = zeros.polynomial();
        if let Ok(roots) = p.find_roots() {
            let separated = roots
                .iter()
                .enumerate()
                .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > SEPARATED));
            if separated && roots.iter().all(|a| a.norm() < 1.0) {
                return LogDerivative::Zeros(roots);
            }
        }
        let d = zeros.len();
        let q = ComplexPolynomial::new(
            (0..=d)
                .map(|k| {
                    let e = if k == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        zeros.values()[k - 1].conj()
                    };
                    if k % 2 == 0 {
                        e
                    } else {
                        -e
                    }
                })
                .collect(),
        );
        let (p1, q1) = (p.derivative(), q.derivative());
        let (p2, q2) = (p1.derivative(), q1.derivative());
        LogDerivative::Coefficients {
            p: [p, p1, p2],
            q: [q, q1, q2],
        }
    }

    fn eval(&self, w: Complex64) -> Complex64 {
        // (P'/P, (P'/P)', D'/D, (D'/D)')
        let (lp, dlp, lq, dlq) = match self {
            LogDerivative::Zeros(roots) => {
                let (mut lp, mut dlp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                let (mut lq, mut dlq) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for a in roots {
                    let u = (w - a).inv();
                    lp += u;
                    dlp -= u * u;
                    let v = a.conj() / (Complex64::new(1.0, 0.0) - a.conj() * w);
                    lq -= v;
                    dlq -= v * v;
                }
                (lp, dlp, lq, dlq)
            }
            LogDerivative::Coefficients { p, q } => {
                let [p0, p1, p2] = p.each_ref().map(|c| c.eval(w));
                let [q0, q1, q2] = q.each_ref().map(|c| c.eval(w));
                let (lp, lq) = (p1 / p0, q1 / q0);
                (lp, p2 / p0 - lp * lp, lq, q2 / q0 - lq * lq)
            }
        };
        let inv = w.inv();
        let ln = inv + lp;
        let g = ln - lq;
        let dg = -inv * inv + dlp - dlq;
        w * (ln + lq + dg / g)
    }
}

/// Trapezoid sums for `p_0, …, p_d`, doubling the node count until two
/// consecutive levels agree.
fn trapezoid_power_sums(q: &LogDerivative, d: usize) -> Result<Vec<Complex64>> {
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); d + 1];
    let add_nodes = |acc: &mut [Complex64], n: usize, first: usize, stride: usize| -> Result<()> {
        for j in (first..n).step_by(stride) {
            let w = Complex64::from_polar(1.0, core::f64::consts::TAU * j as f64 / n as f64);
            let value = q.eval(w);
            if !value.is_finite() {
                return Err(Error::IndecisiveRoot { re: w.re, im: w.im });
            }
            let mut wk = value;
            for slot in acc.iter_mut() {
                *slot += wk;
                wk *= w;
            }
        }
        Ok(())
    };
    let mut n = MIN_NODES;
    add_nodes(&mut acc, n, 0, 1)?;
    let mut previous: Vec<Complex64> = acc.iter().map(|s| s / n as f64).collect();
    while n < MAX_NODES {
        n *= 2;
        add_nodes(&mut acc, n, 1, 2)?;
        let current: Vec<Complex64> = acc.iter().map(|s| s / n as f64).collect();
        let change = current
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change <= QUADRATURE_AGREEMENT {
            return Ok(current);
        }
        previous = current;
    }
    // A critical point this close to the circle makes every level disagree.
    let w = previous[1] / previous[0].re.max(1.0);
    Err(Error::IndecisiveRoot { re: w.re, im: w.im })
}

/// The critical multiset of the normalized product with the given zeros.
pub fn forward_phi(zeros: &PointMultiset) -> Result<CriticalResult> {
    if zeros.is_empty() {
        return Err(Error::Empty);
    }
    let coords = SymmetricCoordinates::from_points(zeros.values());
    let roots = classify_critical_roots(&coords)?;
    let clusters = roots.poly.cluster_roots(&roots.interior);
    let points = expand_clusters(&clusters)?;
    let f = BlaschkeProduct::new(zeros.clone());
    let residuals: Vec<f64> = points
        .iter()
        .map(|c| f.derivative(c.value()).norm())
        .collect();
    // Clustered roots next to the circle can scatter across it; a failed
    // residual there means the classification cannot be trusted.
    if let Some((c, _)) = points
        .iter()
        .zip(&residuals)
        .find(|(c, &r)| r > RESIDUAL_BOUND && 1.0 - c.modulus() < NEAR_CIRCLE)
    {
        return Err(Error::IndecisiveRoot {
            re: c.re(),
            im: c.im(),
        });
    }
    Ok(CriticalResult {
        critical_points: points,
        reflected_partners: roots.exterior,
        partners_at_infinity: roots.at_infinity,
        residuals,
    })
}

fn expand_clusters(clusters: &[RootCluster]) -> Result<PointMultiset> {
    let mut points = Vec::new();
    for cl in clusters {
        let p = DiskPoint::from_complex(cl.center)?;
        points.extend(core::iter::repeat_n(p, cl.multiplicity));
    }
    Ok(PointMultiset::new(points))
}

/// Distinct critical points with their multiplicities; the map has local
/// degree `m + 1` at a point of multiplicity `m`.
pub fn multiplicity_profile(zeros: &PointMultiset) -> Result<Vec<(DiskPoint, usize)>> {
    let critical = forward_phi(zeros)?.critical_points;
    let mut out: Vec<(DiskPoint, usize)> = Vec::new();
    for p in critical.iter() {
        match out.last_mut() {
            Some((q, m)) if *q == *p => *m += 1,
            _ => out.push((*p, 1)),
        }
    }
    // Equal points are adjacent in canonical order, but clusters centred
    // within the merge distance of one another may not be.
    let mut merged: Vec<(DiskPoint, usize)> = Vec::new();
    for (p, m) in out {
        if let Some(entry) = merged
            .iter_mut()
            .find(|(q, _)| (q.value() - p.value()).norm() <= 1e-7)
        {
            entry.1 += m;
        } else {
            merged.push((p, m));
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ms(pairs: &[[f64; 2]]) -> PointMultiset {
        PointMultiset::from_pairs(pairs).unwrap()
    }

    /// Coefficients compared up to an overall complex scale.
    fn assert_proportional(p: &ComplexPolynomial, expected: &[f64]) {
        assert_eq!(p.degree() + 1, expected.len(), "{p:?}");
        let lead = p.leading() / expected[expected.len() - 1];
        for (got, want) in p.coeffs().iter().zip(expected) {
            assert!((got / lead - want).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn critical_polynomial_single_zero() {
        assert_proportional(&critical_polynomial(&ms(&[[0.5, 0.0]])), &[0.5, -2.0, 0.5]);
    }

    #[test]
    fn critical_polynomial_zeros_at_origin() {
        for d in 1..5 {
            let p = critical_polynomial(&PointMultiset::origin(d));
            let mut expected = alloc::vec![0.0; d + 1];
            expected[d] = (d + 1) as f64;
            assert_proportional(&p, &expected);
        }
    }

    #[test]
    fn critical_polynomial_symmetric_pair() {
        let p = critical_polynomial(&ms(&[[0.5, 0.0], [-0.5, 0.0]]));
        assert_proportional(&p, &[-0.25, 0.0, 2.9375, 0.0, -0.25]);
    }

    #[test]
    fn forward_single_zero() {
        let r = forward_phi(&ms(&[[0.5, 0.0]])).unwrap();
        let expected = (1.0 - libm::sqrt(0.75)) / 0.5;
        assert_relative_eq!(r.critical_points[0].re(), expected, epsilon = 1e-14);
        assert_relative_eq!(r.critical_points[0].re(), 0.2679492, epsilon = 1e-7);
        assert_eq!(r.reflected_partners.len(), 1);
        assert!(r.max_residual() <= 1e-9);
    }

    #[test]
    fn forward_double_zero_at_origin() {
        let r = forward_phi(&PointMultiset::origin(2)).unwrap();
        assert_eq!(r.critical_points, PointMultiset::origin(2));
        assert_eq!(r.partners_at_infinity, 2);
    }

    #[test]
    fn forward_symmetric_pair() {
        let r = forward_phi(&ms(&[[0.5, 0.0], [-0.5, 0.0]])).unwrap();
        // interior roots of -0.25 u^2 + 2.9375 u - 0.25 = 0, u = z^2
        let u = (2.9375 - libm::sqrt(2.9375 * 2.9375 - 0.25)) / 0.5;
        let c = libm::sqrt(u);
        assert_relative_eq!(r.critical_points[0].re(), -c, epsilon = 1e-13);
        assert_relative_eq!(r.critical_points[1].re(), c, epsilon = 1e-13);
        assert_relative_eq!(c, 0.2928, epsilon = 5e-5);
    }

    #[test]
    fn forward_rejects_empty() {
        assert_eq!(forward_phi(&PointMultiset::empty()), Err(Error::Empty));
    }

    #[test]
    fn multiplicity_examples() {
        let prof = multiplicity_profile(&PointMultiset::origin(2)).unwrap();
        assert_eq!(prof, [(DiskPoint::ORIGIN, 2)]);
        let prof = multiplicity_profile(&ms(&[[0.5, 0.0]])).unwrap();
        assert_eq!(prof.len(), 1);
        assert_relative_eq!(prof[0].0.re(), 0.2679492, epsilon = 1e-7);
        let prof = multiplicity_profile(&ms(&[[0.5, 0.0], [-0.5, 0.0]])).unwrap();
        assert_eq!(prof.iter().map(|p| p.1).collect::<Vec<_>>(), [1, 1]);
    }

    #[test]
    fn repeated_zero_is_a_critical_point() {
        // a double zero at a gives local degree 2 there: one critical point at a.
        let a = [0.3, -0.2];
        let r = forward_phi(&ms(&[a, a])).unwrap();
        let hit = r
            .critical_points
            .iter()
            .filter(|c| (c.value() - Complex64::new(a[0], a[1])).norm() < 1e-9)
            .count();
        assert_eq!(hit, 1);
    }

    #[test]
    fn near_boundary_zero_reports_indecisive_root() {
        // A double zero is itself critical, so it lands inside the band.
        let a = 1.0 - 5e-8;
        let err = forward_phi(&ms(&[[a, 0.0], [a, 0.0], [-0.2, 0.1]])).unwrap_err();
        assert!(matches!(err, Error::IndecisiveRoot { .. }), "{err:?}");
    }
}
