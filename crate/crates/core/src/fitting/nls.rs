//! Bounded Levenberg-Marquardt with finite-difference Jacobians.

use num_complex::Complex;
use num_traits::Float;

use super::linalg::{cholesky, cholesky_solve, inverse_spd, normal_equations, scaled_condition};
use super::{Bound, Dataset, FitError, FitResult};
use crate::scalar::Real;

/// A model ordinate: one real component, or two for a complex value.
pub trait Observable<T: Real>: Copy + std::fmt::Debug + Send + Sync {
    const COMPONENTS: usize;
    fn component(&self, c: usize) -> T;
    fn is_finite(&self) -> bool;
}

impl<T: Real> Observable<T> for T {
    const COMPONENTS: usize = 1;
    #[inline]
    fn component(&self, _c: usize) -> T {
        *self
    }
    fn is_finite(&self) -> bool {
        Float::is_finite(*self)
    }
}

impl<T: Real> Observable<T> for Complex<T> {
    const COMPONENTS: usize = 2;
    #[inline]
    fn component(&self, c: usize) -> T {
        if c == 0 {
            self.re
        } else {
            self.im
        }
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A parameterized curve `y = f(x; p)`.
pub trait Model<T: Real> {
    type Output: Observable<T>;
    fn id(&self) -> &str;
    fn param_names(&self) -> Vec<String>;
    fn eval(&self, x: T, params: &[T]) -> Self::Output;
}

/// Adapts a closure into a [`Model`].
pub struct FnModel<F> {
    id: String,
    names: Vec<String>,
    f: F,
}

impl<F> FnModel<F> {
    pub fn new(id: impl Into<String>, names: &[&str], f: F) -> Self {
        Self { id: id.into(), names: names.iter().map(|s| s.to_string()).collect(), f }
    }
}

impl<T: Real, Y: Observable<T>, F: Fn(T, &[T]) -> Y> Model<T> for FnModel<F> {
    type Output = Y;
    fn id(&self) -> &str {
        &self.id
    }
    fn param_names(&self) -> Vec<String> {
        self.names.clone()
    }
    fn eval(&self, x: T, params: &[T]) -> Y {
        (self.f)(x, params)
    }
}

/// How the parameter covariance is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceScaling {
    /// Scale by the reduced chi-square when no uncertainties were given.
    Auto,
    /// Always scale by the reduced chi-square.
    ReducedChiSquare,
    /// Treat the supplied uncertainties as absolute.
    Absolute,
}

#[derive(Clone, Copy, Debug)]
pub struct NlsOptions<T> {
    pub max_iterations: usize,
    pub step_tolerance: T,
    pub cost_tolerance: T,
    pub covariance: CovarianceScaling,
    /// Return the last iterate with `converged = false` instead of failing.
    pub allow_unconverged: bool,
}

impl<T: Real> Default for NlsOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            step_tolerance: T::lit(1e-10),
            cost_tolerance: T::lit(1e-14).max(T::epsilon() * T::lit(10.0)),
            covariance: CovarianceScaling::Auto,
            allow_unconverged: false,
        }
    }
}

struct Problem<'a, T: Real, M: Model<T>> {
    model: &'a M,
    data: &'a Dataset<T, M::Output>,
    bounds: &'a [Bound<T>],
}

impl<T: Real, M: Model<T>> Problem<'_, T, M> {
    fn residual_len(&self) -> usize {
        self.data.x.len() * M::Output::COMPONENTS
    }

    /// Weighted residuals `(y - f) / sigma`, components of each point adjacent.
    fn residuals(&self, p: &[T], out: &mut [T]) -> bool {
        let nc = M::Output::COMPONENTS;
        for (k, (&x, y)) in self.data.x.iter().zip(&self.data.y).enumerate() {
            let f = self.model.eval(x, p);
            if !f.is_finite() {
                return false;
            }
            let w = self.data.sigma.as_ref().map_or(T::one(), |s| T::one() / s[k]);
            for c in 0..nc {
                out[k * nc + c] = (y.component(c) - f.component(c)) * w;
            }
        }
        true
    }

    fn step_size(&self, v: T) -> T {
        let rel = T::lit(1e-6).max(T::epsilon().sqrt());
        let abs = T::lit(1e-8).max(T::epsilon() * T::lit(10.0));
        abs.max(rel * v.abs())
    }

    /// Jacobian of the model (`-d residual / dp`), row-major `m x n`.
    fn jacobian(&self, p: &[T], r0: &[T], central: bool, jac: &mut [T]) -> bool {
        let m = r0.len();
        let n = p.len();
        let mut pp = p.to_vec();
        let mut rp = vec![T::zero(); m];
        let mut rm = vec![T::zero(); m];
        for j in 0..n {
            let h = self.step_size(p[j]);
            let b = self.bounds[j];
            let up_ok = p[j] + h <= b.hi;
            let down_ok = p[j] - h >= b.lo;
            let ok = if central && up_ok && down_ok {
                pp[j] = p[j] + h;
                let a = self.residuals(&pp, &mut rp);
                pp[j] = p[j] - h;
                let c = self.residuals(&pp, &mut rm);
                for k in 0..m {
                    jac[k * n + j] = (rm[k] - rp[k]) / (h + h);
                }
                a && c
            } else {
                let hs = if up_ok || !down_ok { h } else { -h };
                pp[j] = p[j] + hs;
                let a = self.residuals(&pp, &mut rp);
                for k in 0..m {
                    jac[k * n + j] = (r0[k] - rp[k]) / hs;
                }
                a
            };
            pp[j] = p[j];
            if !ok {
                return false;
            }
        }
        true
    }

    fn project(&self, p: &mut [T]) {
        for (v, b) in p.iter_mut().zip(self.bounds) {
            *v = v.max(b.lo).min(b.hi);
        }
    }
}

fn half_norm2<T: Real>(r: &[T]) -> T {
    let s: f64 = r.iter().map(|v| v.to_f64_lossy().powi(2)).sum();
    T::lit(0.5 * s)
}

fn scaled_norm<T: Real>(d: &[T], v: &[T]) -> T {
    d.iter().zip(v).map(|(&a, &b)| (a * b) * (a * b)).sum::<T>().sqrt()
}

/// Minimizes `sum ((y - f(x; p)) / sigma)^2` subject to box bounds.
///
/// Complex ordinates contribute their real and imaginary parts as separate
/// residuals. Steps are projected onto the bounds.
pub fn fit_nls<T: Real, M: Model<T>>(
    model: &M,
    init: &[T],
    bounds: &[Bound<T>],
    data: &Dataset<T, M::Output>,
    opts: &NlsOptions<T>,
) -> Result<FitResult<T>, FitError> {
    let names = model.param_names();
    let n = init.len();
    if names.len() != n || bounds.len() != n {
        return Err(FitError::InvalidData(format!(
            "{} parameters, {} names and {} bounds",
            n,
            names.len(),
            bounds.len()
        )));
    }
    data.validate(n)?;
    for ((name, &v), b) in names.iter().zip(init).zip(bounds) {
        if !(v >= b.lo && v <= b.hi) {
            return Err(FitError::InitOutOfBounds {
                param: name.clone(),
                value: v.to_f64_lossy(),
                lo: b.lo.to_f64_lossy(),
                hi: b.hi.to_f64_lossy(),
            });
        }
    }
    let prob = Problem { model, data, bounds };
    let m = prob.residual_len();

    let mut p = init.to_vec();
    let mut r = vec![T::zero(); m];
    if !prob.residuals(&p, &mut r) {
        return Err(FitError::InvalidData("model is not finite at the initial parameters".into()));
    }
    let mut cost = half_norm2(&r);
    let mut jac = vec![T::zero(); m * n];
    let mut diag = vec![T::zero(); n];
    let mut lambda = T::lit(1e-3);
    let mut central = false;
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![T::zero(); n];
    let mut r_trial = vec![T::zero(); m];
    let xtol = opts.step_tolerance;
    let ftol = opts.cost_tolerance;

    'outer: while iterations < opts.max_iterations {
        iterations += 1;
        if cost == T::zero() {
            converged = true;
            break;
        }
        if !prob.jacobian(&p, &r, central, &mut jac) {
            return Err(FitError::InvalidData("model is not finite near the current parameters".into()));
        }
        let (a, g) = normal_equations(&jac, &r, n);
        for j in 0..n {
            diag[j] = diag[j].max(a.at(j, j).sqrt()).max(T::min_positive_value().sqrt());
        }
        let gnorm = (0..n)
            .map(|j| {
                let col = a.at(j, j).sqrt();
                if col > T::zero() {
                    g[j].abs() / (col * (T::two() * cost).sqrt())
                } else {
                    T::zero()
                }
            })
            .fold(T::zero(), T::max);
        if gnorm <= T::lit(1e-14).max(T::epsilon()) {
            converged = true;
            break;
        }
        loop {
            let mut damped = a.clone();
            for j in 0..n {
                let v = damped.at(j, j) + lambda * diag[j] * diag[j];
                damped.set(j, j, v);
            }
            let step = match cholesky(&damped) {
                Some(l) => cholesky_solve(&l, &g),
                None => {
                    lambda *= T::lit(10.0);
                    if lambda > T::lit(1e30) {
                        break 'outer;
                    }
                    continue;
                }
            };
            for j in 0..n {
                trial[j] = p[j] + step[j];
            }
            prob.project(&mut trial);
            let dp: Vec<T> = trial.iter().zip(&p).map(|(&a, &b)| a - b).collect();
            let dnorm = scaled_norm(&diag, &dp);
            let pnorm = scaled_norm(&diag, &p);
            let ok = prob.residuals(&trial, &mut r_trial);
            let new_cost = if ok { half_norm2(&r_trial) } else { T::infinity() };
            if new_cost < cost {
                let rel_reduction = (cost - new_cost) / cost;
                p.copy_from_slice(&trial);
                std::mem::swap(&mut r, &mut r_trial);
                cost = new_cost;
                lambda = (lambda * T::lit(0.3)).max(T::lit(1e-15));
                if dnorm <= xtol * (pnorm + xtol) || rel_reduction <= ftol {
                    converged = true;
                    break 'outer;
                }
                if dnorm <= T::lit(1e-6) * (pnorm + xtol) {
                    central = true;
                }
                break;
            }
            if dnorm <= xtol * (pnorm + xtol) {
                converged = true;
                break 'outer;
            }
            central = true;
            lambda *= T::lit(10.0);
            if lambda > T::lit(1e30) {
                converged = true;
                break 'outer;
            }
        }
    }

    if !converged && !opts.allow_unconverged {
        return Err(FitError::NoConvergence { iterations, residual_norm: (T::two() * cost).sqrt().to_f64_lossy() });
    }
    finish(&prob, model.id(), names, p, &r, cost, converged, iterations, opts)
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Real, M: Model<T>>(
    prob: &Problem<'_, T, M>,
    model_id: &str,
    names: Vec<String>,
    p: Vec<T>,
    r: &[T],
    cost: T,
    converged: bool,
    iterations: usize,
    opts: &NlsOptions<T>,
) -> Result<FitResult<T>, FitError> {
    let n = p.len();
    let m = r.len();
    let mut jac = vec![T::zero(); m * n];
    if !prob.jacobian(&p, r, true, &mut jac) {
        return Err(FitError::InvalidData("model is not finite at the solution".into()));
    }
    let (a, _) = normal_equations(&jac, r, n);
    let condition = scaled_condition(&a);
    let inv = if condition.to_f64_lossy() * T::epsilon().to_f64_lossy() < 1.0 { inverse_spd(&a) } else { None };
    let Some(mut cov) = inv else {
        return Err(FitError::SingularJacobian { condition: condition.to_f64_lossy() });
    };
    let dof = m.saturating_sub(n).max(1);
    let reduced_chi2 = T::two() * cost / T::from_usize_lossy(dof);
    let scale = match opts.covariance {
        CovarianceScaling::Absolute => false,
        CovarianceScaling::ReducedChiSquare => true,
        CovarianceScaling::Auto => prob.data.sigma.is_none(),
    };
    if scale {
        cov.a.iter_mut().for_each(|v| *v *= reduced_chi2);
    }
    Ok(FitResult::from_parts(
        model_id,
        names,
        p,
        &cov,
        (T::two() * cost).sqrt(),
        reduced_chi2,
        m,
        converged,
        iterations,
        condition,
    ))
}

/// Propagates a covariance through `phys = g(internal)` given the Jacobian
/// `dg/dinternal` (row-major `n x n`).
pub(crate) fn transform_covariance<T: Real>(cov: &[Vec<T>], jac: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = cov.len();
    let mut tmp = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            tmp[i][j] = (0..n).map(|k| jac[i][k] * cov[k][j]).sum();
        }
    }
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| tmp[i][k] * jac[j][k]).sum();
        }
    }
    for i in 0..n {
        for j in 0..i {
            let v = (out[i][j] + out[j][i]) * T::half();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}
