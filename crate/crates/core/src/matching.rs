use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, PointMultiset, Result};

/// Poincaré distance `2 artanh |(z - w) / (1 - conj(w) z)|` between two
/// points of the disk.
pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    let rho = ((z - w).norm() / den).min(1.0);
    2.0 * libm::atanh(rho)
}

/// Minimal total Poincaré distance over bijections between two multisets
/// of equal size.
pub fn hyperbolic_match_distance(p: &PointMultiset, q: &PointMultiset) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let cost: Vec<Vec<f64>> = p
        .iter()
        .map(|a| {
            q.iter()
                .map(|b| hyperbolic_distance(a.value(), b.value()))
                .collect()
        })
        .collect();
    Ok(min_cost_assignment(&cost).1)
}

/// Hungarian algorithm with row and column potentials on a square cost
/// matrix. Returns the column assigned to each row and the total cost.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based arrays; index 0 is the virtual column holding the row being added.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let i0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = col0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (assignment, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DiskAutomorphism, DiskMap, DiskPoint};
    use approx::assert_relative_eq;

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + go(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn matches_brute_force_on_small_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=7 {
            for _ in 0..20 {
                let cost: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.random_range(0.0..10.0)).collect())
                    .collect();
                let (assign, total) = min_cost_assignment(&cost);
                let mut seen = assign.clone();
                seen.sort();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
                assert_relative_eq!(total, brute_force(&cost), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let p = PointMultiset::from_pairs(&[[0.1, 0.2], [-0.4, 0.3]]).unwrap();
        assert_eq!(hyperbolic_match_distance(&p, &p).unwrap(), 0.0);
        let a = PointMultiset::origin(1);
        let b = PointMultiset::from_pairs(&[[0.5, 0.0]]).unwrap();
        let d = hyperbolic_match_distance(&a, &b).unwrap();
        assert_relative_eq!(d, libm::log(3.0), epsilon = 1e-15);
        assert_relative_eq!(d, 1.0986123, epsilon = 1e-7);
        assert!(matches!(
            hyperbolic_match_distance(&a, &p),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn invariant_under_automorphisms() {
        let p = PointMultiset::from_pairs(&[[0.1, 0.2], [-0.4, 0.3], [0.6, -0.6]]).unwrap();
        let q = PointMultiset::from_pairs(&[[0.0, 0.5], [-0.7, -0.1], [0.3, 0.3]]).unwrap();
        let tau = DiskAutomorphism::new(DiskPoint::new(0.35, -0.5).unwrap(), 2.2);
        let map = |m: &PointMultiset| {
            PointMultiset::from_complex(m.values().map(|z| tau.eval(z))).unwrap()
        };
        let before = hyperbolic_match_distance(&p, &q).unwrap();
        let after = hyperbolic_match_distance(&map(&p), &map(&q)).unwrap();
        assert_relative_eq!(before, after, epsilon = 1e-10);
    }
}
