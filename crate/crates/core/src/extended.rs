//! Double-double evaluations for the two places where cancellation in f64
//! is the limiting error: `f'` right next to a multiple critical point, and
//! the last correction of an inverse solution.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

type Dd = Complex<TwoFloat>;

fn widen(z: Complex64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn narrow(z: Dd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

fn one() -> Dd {
    widen(Complex64::new(1.0, 0.0))
}

fn zero() -> Dd {
    widen(Complex64::new(0.0, 0.0))
}

/// `f'(z)` for `f(z) = z * prod β_{a_j}(z)`, by the product rule over the
/// `d + 1` factors.
pub(crate) fn blaschke_derivative(zeros: &[Complex64], z: Complex64) -> Complex64 {
    let z = widen(z);
    let mut values = vec![z];
    let mut slopes = vec![one()];
    for &a in zeros {
        let a = widen(a);
        let ac = a.conj();
        let lambda = (one() - ac) / (one() - a);
        let den = one() - ac * z;
        values.push(lambda * (z - a) / den);
        slopes.push(lambda * (one() - a.norm_sqr()) / (den * den));
    }
    let mut sum = zero();
    for (k, &slope) in slopes.iter().enumerate() {
        let mut term = slope;
        for (j, v) in values.iter().enumerate() {
            if j != k {
                term *= *v;
            }
        }
        sum += term;
    }
    narrow(sum)
}

/// Remainder of the critical polynomial `N'D - ND'` of the zeros modulo the
/// monic polynomial `T` whose roots are the target critical points. It
/// vanishes exactly when the interior critical set equals the target, and
/// stays well conditioned when `T` has multiple roots.
struct Remainder {
    target: Vec<Dd>,
}

impl Remainder {
    fn new(critical: &[Complex64]) -> Self {
        Remainder {
            target: monic_from_roots(&critical.iter().map(|&c| widen(c)).collect::<Vec<_>>()),
        }
    }

    fn eval(&self, zeros: &[Dd]) -> Vec<f64> {
        let d = zeros.len();
        let p = monic_from_roots(zeros);
        let mut n = vec![zero()];
        n.extend(p);
        let mut den = vec![one()];
        for a in zeros {
            let ac = a.conj();
            let mut next = vec![zero(); den.len() + 1];
            for (k, c) in den.iter().enumerate() {
                next[k] += *c;
                next[k + 1] -= ac * *c;
            }
            den = next;
        }
        let mut c = sub(&mul(&derivative(&n), &den), &mul(&n, &derivative(&den)));
        for k in (d..c.len()).rev() {
            let lead = c[k];
            for (i, t) in self.target.iter().enumerate() {
                c[k - d + i] -= lead * *t;
            }
        }
        c.truncate(d);
        c.iter()
            .flat_map(|v| [f64::from(v.re), f64::from(v.im)])
            .collect()
    }
}

fn monic_from_roots(roots: &[Dd]) -> Vec<Dd> {
    let mut p = vec![one()];
    for r in roots {
        let mut next = vec![zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] += *c;
            next[k] -= *r * *c;
        }
        p = next;
    }
    p
}

fn mul(p: &[Dd], q: &[Dd]) -> Vec<Dd> {
    let mut out = vec![zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += *a * *b;
        }
    }
    out
}

fn sub(p: &[Dd], q: &[Dd]) -> Vec<Dd> {
    let mut out = vec![zero(); p.len().max(q.len())];
    for (k, a) in p.iter().enumerate() {
        out[k] += *a;
    }
    for (k, b) in q.iter().enumerate() {
        out[k] -= *b;
    }
    out
}

fn derivative(p: &[Dd]) -> Vec<Dd> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| *c * TwoFloat::from(k as f64))
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

const POLISH_ITERS: usize = 6;
const POLISH_FD_STEP: f64 = 1e-7;

/// Newton on the zeros themselves against [`Remainder`], carried in
/// double-double. Returns the improved zeros rounded to f64, or `None` if
/// no iteration reduced the remainder.
pub(crate) fn polish_zeros(zeros: &[Complex64], critical: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = zeros.len();
    let remainder = Remainder::new(critical);
    let mut x: Vec<Dd> = zeros.iter().map(|&a| widen(a)).collect();
    let mut r = remainder.eval(&x);
    let mut improved = false;
    for _ in 0..POLISH_ITERS {
        let r_norm = norm(&r);
        if r_norm == 0.0 {
            break;
        }
        let mut jac = DMatrix::zeros(2 * d, 2 * d);
        for j in 0..2 * d {
            let h = if j % 2 == 0 {
                widen(Complex64::new(POLISH_FD_STEP, 0.0))
            } else {
                widen(Complex64::new(0.0, POLISH_FD_STEP))
            };
            let mut probe = x.clone();
            probe[j / 2] = x[j / 2] + h;
            let plus = remainder.eval(&probe);
            probe[j / 2] = x[j / 2] - h;
            let minus = remainder.eval(&probe);
            for i in 0..2 * d {
                jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * POLISH_FD_STEP);
            }
        }
        let rhs = DVector::from_iterator(2 * d, r.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs)?;
        let trial: Vec<Dd> = x
            .iter()
            .enumerate()
            .map(|(k, a)| *a + widen(Complex64::new(step[2 * k], step[2 * k + 1])))
            .collect();
        let trial_r = remainder.eval(&trial);
        if norm(&trial_r) > 0.5 * r_norm {
            break;
        }
        x = trial;
        r = trial_r;
        improved = true;
    }
    improved.then(|| x.into_iter().map(narrow).collect())
}
