//! Points of the open disk, disk automorphisms, and normalized Blaschke
//! products.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::{Error, PointMultiset, Result};

/// Points with `|z| > 1 - BOUNDARY_TOLERANCE` are treated as boundary points
/// and rejected.
pub const BOUNDARY_TOLERANCE: f64 = 1e-14;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A complex number strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let modulus = z.norm();
        // NaN fails the comparison and is rejected with the rest.
        if modulus <= 1.0 - BOUNDARY_TOLERANCE {
            Ok(DiskPoint(z))
        } else {
            Err(Error::OutsideDisk { re: z.re, im: z.im })
        }
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.0.re
    }

    #[inline]
    pub fn im(self) -> f64 {
        self.0.im
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.0.norm()
    }

    /// Lexicographic order on `(re, im)`; the canonical order of multisets.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.0
            .re
            .total_cmp(&other.0.re)
            .then_with(|| self.0.im.total_cmp(&other.0.im))
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

/// A holomorphic self-map of the disk that can be evaluated together with
/// its derivative.
pub trait DiskMap {
    fn eval(&self, z: Complex64) -> Complex64;

    fn derivative(&self, z: Complex64) -> Complex64;

    /// `1 - |f(z)|^2`. Implementors override this when a formula that avoids
    /// cancellation near the unit circle is available.
    fn one_minus_abs_sq(&self, z: Complex64) -> f64 {
        1.0 - self.eval(z).norm_sqr()
    }
}

impl<M: DiskMap + ?Sized> DiskMap for &M {
    fn eval(&self, z: Complex64) -> Complex64 {
        (**self).eval(z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        (**self).derivative(z)
    }
    fn one_minus_abs_sq(&self, z: Complex64) -> f64 {
        (**self).one_minus_abs_sq(z)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl DiskMap for Identity {
    fn eval(&self, z: Complex64) -> Complex64 {
        z
    }
    fn derivative(&self, _z: Complex64) -> Complex64 {
        ONE
    }
    fn one_minus_abs_sq(&self, z: Complex64) -> f64 {
        1.0 - z.norm_sqr()
    }
}

/// `outer ∘ inner`, evaluated as a composition of functions.
#[derive(Debug, Clone, Copy)]
pub struct Composed<F, G> {
    pub outer: F,
    pub inner: G,
}

impl<F, G> Composed<F, G> {
    pub fn new(outer: F, inner: G) -> Self {
        Composed { outer, inner }
    }
}

impl<F: DiskMap, G: DiskMap> DiskMap for Composed<F, G> {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.outer.eval(self.inner.eval(z))
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        self.outer.derivative(self.inner.eval(z)) * self.inner.derivative(z)
    }
    fn one_minus_abs_sq(&self, z: Complex64) -> f64 {
        self.outer.one_minus_abs_sq(self.inner.eval(z))
    }
}

/// `τ(z) = e^{iθ} (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    pub a: DiskPoint,
    pub theta: f64,
}

impl DiskAutomorphism {
    pub fn new(a: DiskPoint, theta: f64) -> Self {
        DiskAutomorphism { a, theta }
    }

    pub fn identity() -> Self {
        Self::new(DiskPoint::ORIGIN, 0.0)
    }

    pub fn rotation(theta: f64) -> Self {
        Self::new(DiskPoint::ORIGIN, theta)
    }

    /// The automorphism sending `a` to 0 and fixing 1.
    pub fn normalized(a: DiskPoint) -> Self {
        let a = a.value();
        let lambda = (ONE - a.conj()) / (ONE - a);
        Self::new(DiskPoint(a), lambda.arg())
    }

    pub fn inverse(&self) -> Self {
        let rot = Complex64::from_polar(1.0, self.theta);
        DiskAutomorphism {
            a: DiskPoint(-self.a.value() * rot),
            theta: -self.theta,
        }
    }

    fn rotation_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

impl DiskMap for DiskAutomorphism {
    fn eval(&self, z: Complex64) -> Complex64 {
        let a = self.a.value();
        self.rotation_factor() * (z - a) / (ONE - a.conj() * z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let a = self.a.value();
        let den = ONE - a.conj() * z;
        self.rotation_factor() * (1.0 - a.norm_sqr()) / (den * den)
    }

    fn one_minus_abs_sq(&self, z: Complex64) -> f64 {
        let a = self.a.value();
        (1.0 - a.norm_sqr()) * (1.0 - z.norm_sqr()) / (ONE - a.conj() * z).norm_sqr()
    }
}

/// The factor `β_a(z) = (1 - conj(a)) / (1 - a) * (z - a) / (1 - conj(a) z)`:
/// the automorphism sending `a` to 0 and fixing 1.
pub fn beta_eval(a: DiskPoint, z: Complex64) -> Complex64 {
    Factor::new(a).eval(z)
}

/// `β_{a_n}(z)` for the last element of a sequence tending to the circle.
/// The sequence itself is inspected by callers; this only evaluates the tail.
pub fn degeneration_limit(sequence: &[DiskPoint], z: Complex64) -> Result<Complex64> {
    let last = sequence.last().ok_or(Error::Empty)?;
    Ok(beta_eval(*last, z))
}

#[derive(Debug, Clone, Copy)]
struct Factor {
    a: Complex64,
    a_conj: Complex64,
    lambda: Complex64,
    one_minus_abs_sq: f64,
}

impl Factor {
    fn new(a: DiskPoint) -> Self {
        let a = a.value();
        Factor {
            a,
            a_conj: a.conj(),
            lambda: (ONE - a.conj()) / (ONE - a),
            one_minus_abs_sq: 1.0 - a.norm_sqr(),
        }
    }

    #[inline]
    fn eval(&self, z: Complex64) -> Complex64 {
        self.lambda * (z - self.a) / (ONE - self.a_conj * z)
    }

    #[inline]
    fn derivative(&self, z: Complex64) -> Complex64 {
        let den = ONE - self.a_conj * z;
        self.lambda * self.one_minus_abs_sq / (den * den)
    }
}

/// A normalized Blaschke product `z * prod_j β_{a_j}(z)` of degree `d + 1`.
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    zeros: PointMultiset,
    factors: Vec<Factor>,
}

impl BlaschkeProduct {
    pub fn new(zeros: PointMultiset) -> Self {
        let factors = zeros.iter().copied().map(Factor::new).collect();
        BlaschkeProduct { zeros, factors }
    }

    pub fn from_points(zeros: impl IntoIterator<Item = DiskPoint>) -> Self {
        Self::new(PointMultiset::new(zeros.into_iter().collect()))
    }

    /// `f(z) = z`.
    pub fn identity() -> Self {
        Self::new(PointMultiset::empty())
    }

    /// The zeros `a_j`, excluding the implicit zero at the origin.
    pub fn zeros(&self) -> &PointMultiset {
        &self.zeros
    }

    /// Number of prescribed zeros `d`.
    pub fn zero_count(&self) -> usize {
        self.factors.len()
    }

    /// The degree `d + 1` of the map.
    pub fn degree(&self) -> usize {
        self.factors.len() + 1
    }

    /// `Σ (1 - |a_j|^2) / |z - a_j|^2` over all `d + 1` zeros, the origin
    /// included. Equals `z f'(z) / f(z)` and `|f'(z)|` on the unit circle.
    pub fn log_derivative_on_circle(&self, z: Complex64) -> Result<f64> {
        log_derivative_on_circle(self, z)
    }
}

impl DiskMap for BlaschkeProduct {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.factors.iter().fold(z, |acc, f| acc * f.eval(z))
    }

    /// Product rule over the `d + 1` factors using prefix and suffix
    /// products, so zeros of `f` need no special handling.
    fn derivative(&self, z: Complex64) -> Complex64 {
        let n = self.factors.len();
        if n == 0 {
            return ONE;
        }
        let values: Vec<Complex64> = core::iter::once(z)
            .chain(self.factors.iter().map(|f| f.eval(z)))
            .collect();
        let mut suffix = alloc::vec![ONE; n + 2];
        for i in (0..=n).rev() {
            suffix[i] = suffix[i + 1] * values[i];
        }
        let mut prefix = ONE;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let d = if i == 0 {
                ONE
            } else {
                self.factors[i - 1].derivative(z)
            };
            sum += prefix * d * suffix[i + 1];
            prefix *= values[i];
        }
        sum
    }

    /// Accumulates `1 - |AB|^2 = (1 - |A|^2)|B|^2 + (1 - |B|^2)` factor by
    /// factor, with `1 - |β_a(z)|^2 = (1 - |a|^2)(1 - |z|^2) / |1 - conj(a) z|^2`.
    fn one_minus_abs_sq(&self, z: Complex64) -> f64 {
        let gap_z = 1.0 - z.norm_sqr();
        let mut gap = gap_z;
        for f in &self.factors {
            let den = (ONE - f.a_conj * z).norm_sqr();
            let factor_gap = f.one_minus_abs_sq * gap_z / den;
            let factor_abs_sq = (z - f.a).norm_sqr() / den;
            gap = gap * factor_abs_sq + factor_gap;
        }
        gap
    }
}

/// Tolerance on `| |z| - 1 |` for points accepted as lying on the circle.
const CIRCLE_TOLERANCE: f64 = 1e-12;

pub fn log_derivative_on_circle(f: &BlaschkeProduct, z: Complex64) -> Result<f64> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > CIRCLE_TOLERANCE {
        return Err(Error::OffCircle { modulus });
    }
    Ok(f.factors.iter().fold(1.0, |acc, factor| {
        acc + factor.one_minus_abs_sq / (z - factor.a).norm_sqr()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_boundary_and_exterior() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.0, -1.5).is_err());
        assert!(DiskPoint::new(1.0 - 1e-15, 0.0).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiskPoint::new(1.0 - 1e-13, 0.0).is_ok());
    }

    #[test]
    fn beta_sends_a_to_zero_and_fixes_one() {
        let a = p(0.3, -0.6);
        assert!(beta_eval(a, a.value()).norm() < 1e-16);
        assert!((beta_eval(a, ONE) - ONE).norm() < 1e-15);
        let z = c(0.2, 0.7);
        assert_eq!(beta_eval(DiskPoint::ORIGIN, z), z);
    }

    #[test]
    fn beta_is_unimodular_on_circle() {
        let a = p(-0.8, 0.1);
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.39);
            assert_relative_eq!(beta_eval(a, z).norm(), 1.0, epsilon = 1e-14);
            let w = Complex64::from_polar(0.999, k as f64 * 0.39);
            assert!(beta_eval(a, w).norm() < 1.0);
        }
    }

    #[test]
    fn evaluation_examples() {
        let id = BlaschkeProduct::identity();
        assert_eq!(id.eval(c(0.3, 0.1)), c(0.3, 0.1));
        let sq = BlaschkeProduct::from_points([DiskPoint::ORIGIN]);
        assert_relative_eq!(sq.eval(c(0.5, 0.0)).re, 0.25);
        let f = BlaschkeProduct::from_points([p(0.5, 0.0)]);
        assert!((f.eval(ONE) - ONE).norm() < 1e-15);
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn derivative_examples() {
        let sq = BlaschkeProduct::from_points([DiskPoint::ORIGIN]);
        assert_relative_eq!(sq.derivative(c(0.5, 0.0)).re, 1.0, epsilon = 1e-15);
        let f = BlaschkeProduct::from_points([p(0.5, 0.0)]);
        assert_relative_eq!(f.derivative(ONE).norm(), 4.0, epsilon = 1e-14);
        let id = BlaschkeProduct::identity();
        assert_eq!(id.derivative(c(0.9, -0.2)), ONE);
    }

    #[test]
    fn derivative_at_a_zero_of_f() {
        // f = z * β_a has a simple zero at a; f'(a) = a * β_a'(a).
        let a = p(0.4, 0.2);
        let f = BlaschkeProduct::from_points([a]);
        let lambda = (ONE - a.value().conj()) / (ONE - a.value());
        let expected = a.value() * lambda / (1.0 - a.value().norm_sqr());
        assert!((f.derivative(a.value()) - expected).norm() < 1e-15);
    }

    #[test]
    fn log_derivative_examples() {
        let f = BlaschkeProduct::from_points([p(0.5, 0.0)]);
        assert_relative_eq!(
            f.log_derivative_on_circle(ONE).unwrap(),
            4.0,
            epsilon = 1e-14
        );
        let cube = BlaschkeProduct::from_points([DiskPoint::ORIGIN; 2]);
        let z = Complex64::from_polar(1.0, 2.1);
        assert_relative_eq!(
            cube.log_derivative_on_circle(z).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        let id = BlaschkeProduct::identity();
        assert_eq!(id.log_derivative_on_circle(z).unwrap(), 1.0);
        assert!(matches!(
            f.log_derivative_on_circle(c(0.5, 0.0)),
            Err(Error::OffCircle { .. })
        ));
    }

    #[test]
    fn automorphism_examples() {
        let z = c(0.1, -0.3);
        assert_eq!(DiskAutomorphism::identity().eval(z), z);
        let t = DiskAutomorphism::normalized(p(0.5, 0.0));
        assert!(t.eval(c(0.5, 0.0)).norm() < 1e-16);
        assert!((t.eval(ONE) - ONE).norm() < 1e-15);
        let t = DiskAutomorphism::new(p(-0.2, 0.7), 1.3);
        for k in 0..32 {
            let w = Complex64::from_polar(1.0, k as f64 * 0.2);
            assert_relative_eq!(t.eval(w).norm(), 1.0, epsilon = 1e-12);
        }
        let back = t.inverse();
        assert!((back.eval(t.eval(z)) - z).norm() < 1e-15);
    }

    #[test]
    fn automorphism_gap_matches_direct_formula() {
        let t = DiskAutomorphism::new(p(0.6, 0.3), -0.4);
        let z = c(-0.2, 0.5);
        assert_relative_eq!(
            t.one_minus_abs_sq(z),
            1.0 - t.eval(z).norm_sqr(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn degeneration_toward_non_unit_boundary_point() {
        // a_n -> -1: β_{a_n}(0) -> 1.
        let seq: Vec<_> = (1..=30)
            .map(|k| p(-(1.0 - libm::exp2(-(k as f64))), 0.0))
            .collect();
        let v = degeneration_limit(&seq, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v - ONE).norm() < 1e-8);
        assert_eq!(degeneration_limit(&[], ONE), Err(Error::Empty));
    }

    #[test]
    fn degeneration_toward_one_along_reals() {
        let a = p(1.0 - libm::exp2(-20.0), 0.0);
        let v = degeneration_limit(&[a], Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, -a.re(), epsilon = 1e-15);
        let a = p(0.0, 0.999);
        let v = degeneration_limit(&[a], Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.norm(), 0.999, epsilon = 1e-15);
    }

    #[test]
    fn composed_chain_rule() {
        let f = BlaschkeProduct::from_points([p(0.3, 0.2)]);
        let g = DiskAutomorphism::new(p(-0.1, 0.4), 0.7);
        let h = Composed::new(&f, &g);
        let z = c(0.25, -0.35);
        assert_eq!(h.eval(z), f.eval(g.eval(z)));
        let step = 1e-6;
        let fd = (h.eval(z + step) - h.eval(z - step)) / (2.0 * step);
        assert!((h.derivative(z) - fd).norm() < 1e-8);
    }
}
