use std::io::Write;

use blaschke_core::{BlaschkeProduct, Complex64, MetricSample};

const HALF_WIDTH: f64 = 0.95;
pub const MIN_GRID: usize = 8;

/// `σ_f` and `R_f` on a `grid × grid` lattice over `[-0.95, 0.95]^2`,
/// row-major in the imaginary part, skipping points outside the disk.
pub fn sample_metric(f: &BlaschkeProduct, grid: usize) -> Vec<MetricSample> {
    assert!(grid >= MIN_GRID, "grid must be at least {MIN_GRID}");
    let coord = |i: usize| -HALF_WIDTH + 2.0 * HALF_WIDTH * i as f64 / (grid - 1) as f64;
    let mut out = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let z = Complex64::new(coord(j), coord(i));
            if z.norm_sqr() < 1.0 {
                let mut s = MetricSample::at(f, z);
                // rounding can push R a few ulps past 1 where f is an isometry
                s.ratio = s.ratio.min(1.0);
                out.push(s);
            }
        }
    }
    out
}

pub fn write_csv<W: Write>(samples: &[MetricSample], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "sigma", "ratio"])?;
    for s in samples {
        w.serialize((s.z.re, s.z.im, s.sigma, s.ratio))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use blaschke_core::PointMultiset;

    fn in_disk(grid: usize) -> usize {
        let c = |i: usize| -0.95 + 1.9 * i as f64 / (grid - 1) as f64;
        (0..grid)
            .flat_map(|i| (0..grid).map(move |j| (c(i), c(j))))
            .filter(|(x, y)| x * x + y * y < 1.0)
            .count()
    }

    #[test]
    fn identity_ratio_is_one() {
        let s = sample_metric(&BlaschkeProduct::identity(), 16);
        assert!(s.iter().all(|p| p.ratio == 1.0));
        assert_eq!(s.len(), in_disk(16));
    }

    #[test]
    fn ratio_is_smallest_at_the_critical_point() {
        let f = BlaschkeProduct::new(PointMultiset::origin(1));
        let grid = 21;
        let s = sample_metric(&f, grid);
        let centre = s
            .iter()
            .min_by(|a, b| a.z.norm().total_cmp(&b.z.norm()))
            .unwrap();
        assert!(centre.z.norm() < 1e-12);
        let neighbours = s.iter().filter(|p| (p.z - centre.z).norm() < 0.2);
        assert!(neighbours.into_iter().all(|p| p.ratio >= centre.ratio));
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let f = BlaschkeProduct::new(PointMultiset::from_pairs(&[[0.5, 0.0]]).unwrap());
        let s = sample_metric(&f, 12);
        assert_eq!(s.len(), in_disk(12));
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("re,im,sigma,ratio"));
        assert_eq!(lines.count(), s.len());
        assert!(s.iter().all(|p| (0.0..=1.0).contains(&p.ratio)));
    }
}
