//! Dense helpers for the handful-of-parameters normal equations.

use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Square<T> {
    pub n: usize,
    pub a: Vec<T>,
}

impl<T: Real> Square<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![T::zero(); n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.a.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// `J^T J` and `J^T r` for a row-major `m x n` Jacobian. Sums run in f64 so
/// single-precision fits keep their conditioning.
pub(crate) fn normal_equations<T: Real>(jac: &[T], r: &[T], n: usize) -> (Square<T>, Vec<T>) {
    let m = r.len();
    let mut a = vec![0.0f64; n * n];
    let mut g = vec![0.0f64; n];
    for k in 0..m {
        let row = &jac[k * n..(k + 1) * n];
        let rk = r[k].to_f64_lossy();
        for i in 0..n {
            let ji = row[i].to_f64_lossy();
            g[i] += ji * rk;
            for j in 0..=i {
                a[i * n + j] += ji * row[j].to_f64_lossy();
            }
        }
    }
    let mut out = Square::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v = T::lit(a[i * n + j]);
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    (out, g.into_iter().map(T::lit).collect())
}

/// Lower Cholesky factor, or `None` when the matrix is not positive definite.
pub(crate) fn cholesky<T: Real>(m: &Square<T>) -> Option<Square<T>> {
    let n = m.n;
    let mut l = Square::zeros(n);
    for j in 0..n {
        let mut d = m.at(j, j);
        for k in 0..j {
            d -= l.at(j, k) * l.at(j, k);
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l.set(j, j, d);
        for i in j + 1..n {
            let mut s = m.at(i, j);
            for k in 0..j {
                s -= l.at(i, k) * l.at(j, k);
            }
            l.set(i, j, s / d);
        }
    }
    Some(l)
}

pub(crate) fn cholesky_solve<T: Real>(l: &Square<T>, b: &[T]) -> Vec<T> {
    let n = l.n;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let v = l.at(i, k) * y[k];
            y[i] -= v;
        }
        y[i] /= l.at(i, i);
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let v = l.at(k, i) * y[k];
            y[i] -= v;
        }
        y[i] /= l.at(i, i);
    }
    y
}

pub(crate) fn inverse_spd<T: Real>(m: &Square<T>) -> Option<Square<T>> {
    let l = cholesky(m)?;
    let n = m.n;
    let mut inv = Square::zeros(n);
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        let col = cholesky_solve(&l, &e);
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    // Symmetrize against round-off.
    for i in 0..n {
        for j in 0..i {
            let v = (inv.at(i, j) + inv.at(j, i)) * T::half();
            inv.set(i, j, v);
            inv.set(j, i, v);
        }
    }
    Some(inv)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub(crate) fn symmetric_eigenvalues<T: Real>(m: &Square<T>) -> Vec<T> {
    let n = m.n;
    let mut a: Vec<f64> = m.a.iter().map(|v| v.to_f64_lossy()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i].powi(2)).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev.into_iter().map(T::lit).collect()
}

/// 2-norm condition number of `J^T J` after unit-diagonal scaling.
pub(crate) fn scaled_condition<T: Real>(m: &Square<T>) -> T {
    let n = m.n;
    let d: Vec<T> = (0..n).map(|i| m.at(i, i).sqrt()).collect();
    if d.iter().any(|&v| !(v > T::zero())) {
        return T::infinity();
    }
    let mut s = Square::zeros(n);
    for i in 0..n {
        for j in 0..n {
            s.set(i, j, m.at(i, j) / (d[i] * d[j]));
        }
    }
    let ev = symmetric_eigenvalues(&s);
    let (lo, hi) = (ev[0], ev[n - 1]);
    if lo > T::zero() {
        hi / lo
    } else {
        T::infinity()
    }
}
