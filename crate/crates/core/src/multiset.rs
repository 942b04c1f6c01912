use alloc::vec::Vec;
use core::ops::Deref;

use num_complex::Complex64;

use crate::{DiskPoint, Result};

/// An unordered tuple of disk points, stored in canonical lexicographic
/// `(re, im)` order so that equal multisets compare and serialize equally.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointMultiset(Vec<DiskPoint>);

impl PointMultiset {
    pub fn new(mut points: Vec<DiskPoint>) -> Self {
        points.sort_by(DiskPoint::canonical_cmp);
        PointMultiset(points)
    }

    pub fn empty() -> Self {
        PointMultiset(Vec::new())
    }

    /// `d` copies of the origin.
    pub fn origin(d: usize) -> Self {
        PointMultiset(alloc::vec![DiskPoint::ORIGIN; d])
    }

    pub fn from_complex(points: impl IntoIterator<Item = Complex64>) -> Result<Self> {
        let points = points
            .into_iter()
            .map(DiskPoint::from_complex)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(points))
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::from_complex(pairs.iter().map(|&[re, im]| Complex64::new(re, im)))
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.0
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.0.iter().map(|p| p.value())
    }

    pub fn max_modulus(&self) -> f64 {
        self.0.iter().map(|p| p.modulus()).fold(0.0, f64::max)
    }

    pub fn into_vec(self) -> Vec<DiskPoint> {
        self.0
    }
}

impl Deref for PointMultiset {
    type Target = [DiskPoint];

    fn deref(&self) -> &[DiskPoint] {
        &self.0
    }
}

impl FromIterator<DiskPoint> for PointMultiset {
    fn from_iter<I: IntoIterator<Item = DiskPoint>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
