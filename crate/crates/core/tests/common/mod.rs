#![allow(dead_code)]

use std::f64::consts::TAU;

use blaschke_core::{Complex64, DiskAutomorphism, DiskPoint, PointMultiset};
use proptest::prelude::*;

/// Modulus uniform in `[0, max_modulus]`, angle uniform.
pub fn point(max_modulus: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..=max_modulus, 0.0..TAU)
        .prop_map(|(r, t)| DiskPoint::from_complex(Complex64::from_polar(r, t)).unwrap())
}

pub fn multiset(
    max_modulus: f64,
    sizes: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = PointMultiset> {
    prop::collection::vec(point(max_modulus), sizes).prop_map(PointMultiset::new)
}

pub fn automorphism() -> impl Strategy<Value = DiskAutomorphism> {
    (point(0.9), 0.0..TAU).prop_map(|(a, theta)| DiskAutomorphism::new(a, theta))
}

/// A point of the closed disk with `|z| ≤ max_modulus`.
pub fn complex(max_modulus: f64) -> impl Strategy<Value = Complex64> {
    (0.0..=max_modulus, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

pub fn on_circle() -> impl Strategy<Value = Complex64> {
    (0.0..TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

pub fn circle_points(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
}
