//! Nonlinear least-squares fitting and the measurement fit drivers.

mod decay;
mod gap;
mod linalg;
mod nls;
mod power;
mod s11;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

pub use decay::{fit_decay, DecayFit, DEGENERACY_THRESHOLD};
pub use gap::{fit_coherent_tls, fit_loss_tangent, LossTangentFit, LOSS_TANGENT_CONSISTENCY_LIMIT};
pub use nls::{fit_nls, CovarianceScaling, FnModel, Model, NlsOptions, Observable};
pub use power::{fit_power_sweep, PowerSweepOptions, PowerSweepPoint};
pub use s11::{fit_s11, s11_model, ResonanceTrace, S11Guess, S11Params};

/// Two-sided normal quantile for a 95% interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("initial value of '{param}' ({value:e}) lies outside [{lo:e}, {hi:e}]")]
    InitOutOfBounds { param: String, value: f64, lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations (residual norm {residual_norm:e})")]
    NoConvergence { iterations: usize, residual_norm: f64 },
    #[error("singular Jacobian at the solution (scaled condition number {condition:e})")]
    SingularJacobian { condition: f64 },
    #[error("no resonance found: dip depth {depth:e} is below 3x the noise floor {noise:e}")]
    NoResonanceFound { depth: f64, noise: f64 },
    #[error("degenerate fit: t1_in = {t1_in:e} s and t1_res = {t1_res:e} s agree within 10% at 95% confidence")]
    DegenerateFit { t1_in: f64, t1_res: f64 },
}

/// Closed parameter interval; infinite ends are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Bound<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn free() -> Self {
        Self { lo: T::neg_infinity(), hi: T::infinity() }
    }

    pub fn at_least(lo: T) -> Self {
        Self { lo, hi: T::infinity() }
    }
}

/// Abscissae, ordinates (real or complex) and optional per-point
/// uncertainties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T, Y = T> {
    pub x: Vec<T>,
    pub y: Vec<Y>,
    pub sigma: Option<Vec<T>>,
}

impl<T: Real, Y: Observable<T>> Dataset<T, Y> {
    pub fn new(x: Vec<T>, y: Vec<Y>) -> Self {
        Self { x, y, sigma: None }
    }

    pub fn with_sigma(mut self, sigma: Vec<T>) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Checks shapes, finiteness and that there are more points than
    /// `n_params`.
    pub fn validate(&self, n_params: usize) -> Result<(), FitError> {
        if self.x.len() != self.y.len() {
            return Err(FitError::InvalidData(format!("{} abscissae but {} ordinates", self.x.len(), self.y.len())));
        }
        if self.x.len() < n_params + 1 {
            return Err(FitError::InvalidData(format!(
                "{} points cannot constrain {} parameters",
                self.x.len(),
                n_params
            )));
        }
        if let Some(i) = self.x.iter().position(|v| !v.is_finite()) {
            return Err(FitError::InvalidData(format!("abscissa {i} is not finite")));
        }
        if let Some(i) = self.y.iter().position(|v| !v.is_finite()) {
            return Err(FitError::InvalidData(format!("ordinate {i} is not finite")));
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.x.len() {
                return Err(FitError::InvalidData(format!("{} uncertainties for {} points", s.len(), self.x.len())));
            }
            if let Some(i) = s.iter().position(|v| !(*v > T::zero() && v.is_finite())) {
                return Err(FitError::InvalidData(format!("uncertainty {i} must be positive")));
            }
        }
        Ok(())
    }
}

/// Best-fit parameters with linearized uncertainties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub model_id: String,
    pub param_names: Vec<String>,
    pub params: Vec<T>,
    pub covariance: Vec<Vec<T>>,
    /// `1.96 sqrt(diag(covariance))`.
    pub ci95: Vec<T>,
    /// Euclidean norm of the weighted residual vector.
    pub residual_norm: T,
    pub reduced_chi2: T,
    /// Number of scalar residuals (complex points count twice).
    pub n_residuals: usize,
    pub converged: bool,
    pub n_iterations: usize,
    /// Condition number of the column-scaled normal matrix at the solution.
    pub condition_number: T,
    /// Some confidence half-width is at least as large as its parameter.
    pub ill_posed: bool,
}

impl<T: Real> FitResult<T> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        model_id: &str,
        param_names: Vec<String>,
        params: Vec<T>,
        cov: &linalg::Square<T>,
        residual_norm: T,
        reduced_chi2: T,
        n_residuals: usize,
        converged: bool,
        n_iterations: usize,
        condition_number: T,
    ) -> Self {
        let mut out = Self {
            model_id: model_id.to_string(),
            param_names,
            params,
            covariance: cov.to_rows(),
            ci95: Vec::new(),
            residual_norm,
            reduced_chi2,
            n_residuals,
            converged,
            n_iterations,
            condition_number,
            ill_posed: false,
        };
        out.refresh_intervals();
        out
    }

    fn refresh_intervals(&mut self) {
        let z = T::lit(Z95);
        self.ci95 = (0..self.params.len()).map(|i| z * self.covariance[i][i].max(T::zero()).sqrt()).collect();
        self.ill_posed = self.params.iter().zip(&self.ci95).any(|(&p, &c)| !(c < p.abs()));
    }

    /// Replaces the internal parameterization by physical parameters
    /// `values = g(params)` with Jacobian `dg/dparams`.
    pub(crate) fn reparameterize(mut self, model_id: &str, names: &[&str], values: Vec<T>, jac: &[Vec<T>]) -> Self {
        self.covariance = nls::transform_covariance(&self.covariance, jac);
        self.model_id = model_id.to_string();
        self.param_names = names.iter().map(|s| s.to_string()).collect();
        self.params = values;
        self.refresh_intervals();
        self
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.index_of(name).map(|i| self.params[i])
    }

    pub fn ci(&self, name: &str) -> Option<T> {
        self.index_of(name).map(|i| self.ci95[i])
    }

    /// Whether `value` lies inside the 95% interval of `name`.
    pub fn covers(&self, name: &str, value: T) -> bool {
        match self.index_of(name) {
            Some(i) => (self.params[i] - value).abs() <= self.ci95[i],
            None => false,
        }
    }
}
