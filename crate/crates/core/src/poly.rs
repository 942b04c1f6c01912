//! Dense complex polynomials and a simultaneous (Aberth–Ehrlich) root
//! finder.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative threshold for trimming negligible leading coefficients and for
/// deflating roots at the origin.
const TRIM_THRESHOLD: f64 = 1e-14;
/// Roots closer than this (relative to `max(1, |r|)`) are always grouped.
const CLUSTER_DISTANCE: f64 = 1e-7;
/// Candidate radius for numerically multiple roots.
const CLUSTER_SEARCH: f64 = 1e-3;
/// Relative coefficient perturbation below which a group of roots is
/// indistinguishable from one multiple root.
const MULTIPLICITY_NOISE: f64 = 1e-12;
const MAX_ABERTH_ITERATIONS: usize = 500;

/// A polynomial `Σ c_k z^k` with coefficients in ascending degree order.
///
/// Leading coefficients below `1e-14 · max|c_k|` are trimmed on
/// construction. The zero polynomial is stored as `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

/// A group of computed roots that represent one root of the given
/// multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        let scale = max_abs(&coeffs);
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= TRIM_THRESHOLD * scale {
            coeffs.pop();
        }
        if coeffs.is_empty() || scale == 0.0 {
            coeffs = vec![ZERO];
        }
        ComplexPolynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `z - root`.
    pub fn linear(root: Complex64) -> Self {
        ComplexPolynomial {
            coeffs: vec![-root, ONE],
        }
    }

    /// The monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, &r| acc.mul(&Self::linear(r)))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    /// `Σ |c_k| |z|^k`, the magnitude scale used for residual tests.
    pub fn abs_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficient-wise convolution.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::constant(ZERO);
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(ZERO);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Taylor coefficients `p^{(k)}(z0) / k!` for `k = 0..=degree`.
    pub fn taylor_at(&self, z0: Complex64) -> Vec<Complex64> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            // synthetic division by (z - z0); remainder is the next Taylor coefficient
            for i in (k..n - 1).rev() {
                let carry = work[i + 1] * z0;
                work[i] += carry;
            }
            out.push(work[k]);
        }
        out
    }

    /// All `degree` roots, repeated according to multiplicity.
    ///
    /// Roots at the origin are deflated exactly when the low coefficients
    /// vanish to within `1e-14` of the coefficient scale; the remaining
    /// factor is solved by Aberth–Ehrlich iteration seeded from the Newton
    /// polygon of the coefficients, then each root is polished by Newton's
    /// method.
    pub fn find_roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let scale = max_abs(&self.coeffs);
        let zero_roots = self
            .coeffs
            .iter()
            .take(n)
            .take_while(|c| c.norm() <= TRIM_THRESHOLD * scale)
            .count();
        let reduced = &self.coeffs[zero_roots..];
        let mut roots = vec![ZERO; zero_roots];
        match reduced.len() - 1 {
            0 => {}
            1 => roots.push(-reduced[0] / reduced[1]),
            _ => roots.extend(aberth(reduced)?),
        }
        Ok(roots)
    }

    /// Groups roots that are numerically one multiple root.
    ///
    /// Roots within `1e-7` of each other always merge. A wider group (within
    /// `1e-3`) of `k` roots merges into one `k`-fold root when its spread is
    /// no larger than what a `1e-12` relative perturbation of the
    /// coefficients would produce around a `k`-fold root at the centroid.
    pub fn cluster_roots(&self, roots: &[Complex64]) -> Vec<RootCluster> {
        let mut out = Vec::new();
        for group in link_groups(roots, CLUSTER_SEARCH) {
            let members: Vec<Complex64> = group.iter().map(|&i| roots[i]).collect();
            if members.len() > 1 {
                if let Some(cluster) = self.numerical_multiple(&members) {
                    out.push(cluster);
                    continue;
                }
            }
            for tight in link_groups(&members, CLUSTER_DISTANCE) {
                let centroid =
                    tight.iter().map(|&i| members[i]).sum::<Complex64>() / tight.len() as f64;
                out.push(RootCluster {
                    center: self.refine_center(centroid, tight.len(), CLUSTER_DISTANCE),
                    multiplicity: tight.len(),
                });
            }
        }
        out
    }

    fn numerical_multiple(&self, members: &[Complex64]) -> Option<RootCluster> {
        let k = members.len();
        let center = members.iter().sum::<Complex64>() / k as f64;
        let spread = members
            .iter()
            .map(|r| (r - center).norm())
            .fold(0.0, f64::max);
        let taylor = self.taylor_at(center);
        let top = taylor.get(k)?.norm();
        if top == 0.0 {
            return None;
        }
        let noise = MULTIPLICITY_NOISE * self.abs_scale(center);
        let radius = libm::pow(noise / top, 1.0 / k as f64);
        (spread <= 2.0 * radius).then(|| RootCluster {
            center: self.refine_center(center, k, 2.0 * radius),
            multiplicity: k,
        })
    }

    /// A root of multiplicity `k` is a simple root of the `(k-1)`-th
    /// derivative; Newton on that derivative pins the centre far more
    /// accurately than the centroid of the computed roots. The centroid is
    /// kept if the iteration leaves the cluster.
    fn refine_center(&self, centroid: Complex64, k: usize, reach: f64) -> Complex64 {
        if k < 2 {
            return centroid;
        }
        let mut q = self.clone();
        for _ in 1..k {
            q = q.derivative();
        }
        let dq = q.derivative();
        let mut z = centroid;
        for _ in 0..20 {
            let step = q.eval(z) / dq.eval(z);
            if !step.is_finite() {
                return centroid;
            }
            z -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
        if (z - centroid).norm() <= reach.max(CLUSTER_DISTANCE) {
            z
        } else {
            centroid
        }
    }

    /// Roots followed by [`cluster_roots`](Self::cluster_roots).
    pub fn find_root_clusters(&self) -> Result<Vec<RootCluster>> {
        let roots = self.find_roots()?;
        Ok(self.cluster_roots(&roots))
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn add(self, rhs: Self) -> ComplexPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |c: &[Complex64], i: usize| c.get(i).copied().unwrap_or(ZERO);
        ComplexPolynomial::new(
            (0..n)
                .map(|i| get(&self.coeffs, i) + get(&rhs.coeffs, i))
                .collect(),
        )
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn sub(self, rhs: Self) -> ComplexPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: Self) -> ComplexPolynomial {
        ComplexPolynomial::mul(self, rhs)
    }
}

fn max_abs(c: &[Complex64]) -> f64 {
    c.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

/// Single-linkage groups of points within `dist · max(1, |z|)` of a neighbour.
fn link_groups(points: &[Complex64], dist: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = dist * points[i].norm().max(points[j].norm()).max(1.0);
            if (points[i] - points[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[root]].push(i);
    }
    groups
}

/// Evaluation of `p/p'` together with a flag telling whether `|p(z)|` is at
/// the level of rounding error. Points outside the unit circle are handled
/// through the reversed polynomial to keep Horner's rule stable.
struct NewtonStep {
    ratio: Complex64,
    converged: bool,
    residual: f64,
}

fn newton_step(c: &[Complex64], z: Complex64) -> NewtonStep {
    let n = c.len() - 1;
    let bound = 4.0 * n as f64 * f64::EPSILON;
    if z.norm() <= 1.0 {
        let r = z.norm();
        let (mut p, mut dp, mut s) = (ZERO, ZERO, 0.0);
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            s = s * r + a.norm();
        }
        NewtonStep {
            ratio: p / dp,
            converged: p.norm() <= bound * s,
            residual: p.norm() / s,
        }
    } else {
        // p(z) = z^n q(y), y = 1/z, q(y) = Σ c_{n-k} y^k
        let y = z.inv();
        let r = y.norm();
        let (mut q, mut dq, mut s) = (ZERO, ZERO, 0.0);
        for &a in c.iter() {
            dq = dq * y + q;
            q = q * y + a;
            s = s * r + a.norm();
        }
        let ratio = (y * (n as f64 - y * dq / q)).inv();
        NewtonStep {
            ratio,
            converged: q.norm() <= bound * s,
            residual: q.norm() / s,
        }
    }
}

/// Initial guesses on circles whose radii come from the upper convex hull
/// of `(k, log|c_k|)`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(k, a)| (k, libm::log(a.norm())))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross =
                (a.0 as f64 - o.0 as f64) * (p.1 - o.1) - (a.1 - o.1) * (p.0 as f64 - o.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut guesses = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let radius = libm::exp((li - lj) / m as f64);
        for k in 0..m {
            let angle = TAU * k as f64 / m as f64 + TAU * i as f64 / n as f64 + 0.4;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let mut z = initial_guesses(c);
    debug_assert_eq!(z.len(), n);
    let mut done = vec![false; n];
    let mut iterations = 0;
    while done.iter().any(|d| !d) {
        if iterations == MAX_ABERTH_ITERATIONS {
            // Accept the result only if every root passes the loose residual test.
            if z.iter().all(|&r| newton_step(c, r).residual <= 1e-10) {
                break;
            }
            return Err(Error::RootFinderStalled { iterations });
        }
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let step = newton_step(c, z[i]);
            if step.converged {
                done[i] = true;
                continue;
            }
            let w = step.ratio;
            if !w.is_finite() {
                // p'(z) vanished: nudge off the critical point of p
                let nudge = Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += nudge;
                continue;
            }
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let correction = w / (ONE - w * sum);
            z[i] -= if correction.is_finite() {
                correction
            } else {
                w
            };
        }
    }
    for r in z.iter_mut() {
        polish(c, r);
    }
    Ok(z)
}

fn polish(c: &[Complex64], z: &mut Complex64) {
    let mut current = newton_step(c, *z);
    for _ in 0..3 {
        if current.residual == 0.0 || !current.ratio.is_finite() {
            return;
        }
        let candidate = *z - current.ratio;
        let next = newton_step(c, candidate);
        if next.residual < current.residual {
            *z = candidate;
            current = next;
        } else {
            return;
        }
    }
}
