//! Qubit population decay: double-exponential fit with a single-exponential
//! fallback.

use serde::{Deserialize, Serialize};

use super::{fit_nls, Bound, Dataset, FitError, FitResult, FnModel, NlsOptions};
use crate::scalar::Real;

/// Relative separation of the two time constants below which the fit is
/// flagged as degenerate. The separation is tested against its 95% interval,
/// so constants the data cannot tell apart also count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit<T> {
    /// `(n_in, t1_in_s, t1_res_s)`.
    pub double: FitResult<T>,
    /// `(t1_s)` for `P(t) = exp(-t / t1)`.
    pub single: FitResult<T>,
    /// Residual norm of the double fit over that of the single fit.
    pub residual_ratio: T,
    /// `t1_in` and `t1_res` are consistent with agreeing within
    /// [`DEGENERACY_THRESHOLD`] at 95% confidence.
    pub degenerate: bool,
}

impl<T: Real> DecayFit<T> {
    /// The double-exponential result, or [`FitError::DegenerateFit`] when the
    /// two time constants cannot be told apart.
    pub fn require_distinct(&self) -> Result<&FitResult<T>, FitError> {
        if self.degenerate {
            let p = &self.double.params;
            Err(FitError::DegenerateFit { t1_in: p[1].to_f64_lossy(), t1_res: p[2].to_f64_lossy() })
        } else {
            Ok(&self.double)
        }
    }

    /// The single-exponential fit when degenerate, the double fit otherwise.
    pub fn preferred(&self) -> &FitResult<T> {
        if self.degenerate {
            &self.single
        } else {
            &self.double
        }
    }
}

/// Fits `P(t) = exp(n_in (exp(-t/t1_in) - 1)) exp(-t/t1_res)` to populations
/// normalized to `P(0) = 1`, plus the single-exponential fallback.
///
/// Times are rescaled by the largest time internally, so the dimensionless
/// results do not depend on the time unit.
pub fn fit_decay<T: Real>(times: &[T], populations: &[T], sigma: Option<&[T]>) -> Result<DecayFit<T>, FitError> {
    if times.len() != populations.len() {
        return Err(FitError::InvalidData(format!("{} times but {} populations", times.len(), populations.len())));
    }
    if times.len() < 10 {
        return Err(FitError::InvalidData(format!("a decay fit needs at least 10 points, got {}", times.len())));
    }
    if times.iter().any(|&t| !(t >= T::zero() && t.is_finite())) {
        return Err(FitError::InvalidData("times must be finite and non-negative".into()));
    }
    let scale = times.iter().copied().fold(T::zero(), T::max);
    if !(scale > T::zero()) {
        return Err(FitError::InvalidData("times must not all be zero".into()));
    }
    let x: Vec<T> = times.iter().map(|&t| t / scale).collect();
    let mut data = Dataset::new(x.clone(), populations.to_vec());
    if let Some(s) = sigma {
        data = data.with_sigma(s.to_vec());
    }
    let opts = NlsOptions::default();

    let double_model = FnModel::new("double_exponential", &["n_in", "t1_in", "t1_res"], |t: T, u: &[T]| {
        (u[0] * (-t / u[1]).exp_m1() - t / u[2]).exp()
    });
    // Time constants shorter than half the finest sample spacing are not
    // resolved by the data; below that the model collapses onto a scaled
    // single exponential and t1_in loses all leverage.
    let mut sorted = x.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let dt = sorted.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > T::zero()).fold(T::one(), T::min);
    let t_min = dt * T::half();
    let bounds = [Bound::new(T::zero(), T::lit(50.0)), Bound::new(t_min, T::lit(1e3)), Bound::new(t_min, T::lit(1e3))];
    let mut best: Option<FitResult<T>> = None;
    let mut last_err = None;
    for init in double_guesses(&x, populations) {
        let init: Vec<T> = init.iter().zip(&bounds).map(|(&v, b)| v.max(b.lo).min(b.hi)).collect();
        match fit_nls(&double_model, &init, &bounds, &data, &opts) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.residual_norm < b.residual_norm) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let double =
        best.ok_or_else(|| last_err.unwrap_or(FitError::NoConvergence { iterations: 0, residual_norm: f64::NAN }))?;

    let single_model = FnModel::new("single_exponential", &["t1"], |t: T, u: &[T]| (-t / u[0]).exp());
    let t1_0 = tail_time_constant(&x, populations, 0).unwrap_or(T::half());
    let single_bounds = [Bound::new(t_min, T::lit(1e3))];
    let single = fit_nls(&single_model, &[t1_0.max(t_min).min(T::lit(1e3))], &single_bounds, &data, &opts)?;

    let u = double.params.clone();
    let double = double.reparameterize(
        "double_exponential",
        &["n_in", "t1_in_s", "t1_res_s"],
        vec![u[0], u[1] * scale, u[2] * scale],
        &[vec![T::one(), T::zero(), T::zero()], vec![T::zero(), scale, T::zero()], vec![T::zero(), T::zero(), scale]],
    );
    let t1 = single.params[0];
    let single = single.reparameterize("single_exponential", &["t1_s"], vec![t1 * scale], &[vec![scale]]);

    let residual_ratio =
        if single.residual_norm > T::zero() { double.residual_norm / single.residual_norm } else { T::one() };
    let (t_in, t_res) = (double.params[1], double.params[2]);
    let c = &double.covariance;
    let sigma_diff = (c[1][1] + c[2][2] - T::two() * c[1][2]).max(T::zero()).sqrt();
    let excess = (t_in - t_res).abs() - T::lit(DEGENERACY_THRESHOLD) * t_in.max(t_res);
    let degenerate = !(excess > T::lit(super::Z95) * sigma_diff);
    Ok(DecayFit { double, single, residual_ratio, degenerate })
}

/// Log-linear fit over positive populations from index `start`; returns the
/// time constant of the slope and the intercept.
fn log_line<T: Real>(x: &[T], p: &[T], range: std::ops::Range<usize>) -> Option<(T, T)> {
    let pts: Vec<(T, T)> = range.filter(|&i| p[i] > T::zero()).map(|i| (x[i], p[i].ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|a| a.0).sum::<T>() / n;
    let my = pts.iter().map(|a| a.1).sum::<T>() / n;
    let sxx: T = pts.iter().map(|a| (a.0 - mx) * (a.0 - mx)).sum();
    let sxy: T = pts.iter().map(|a| (a.0 - mx) * (a.1 - my)).sum();
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn tail_time_constant<T: Real>(x: &[T], p: &[T], start: usize) -> Option<T> {
    let (slope, _) = log_line(x, p, start..x.len())?;
    (slope < T::zero()).then(|| -T::one() / slope)
}

fn double_guesses<T: Real>(x: &[T], p: &[T]) -> Vec<[T; 3]> {
    let n = x.len();
    let tail_start = n - (n / 3).max(3);
    let early_end = (n / 5).max(3);
    let tail = log_line(x, p, tail_start..n);
    let early = log_line(x, p, 0..early_end);
    let t_res = match tail {
        Some((s, _)) if s < T::zero() => -T::one() / s,
        _ => T::one(),
    };
    let n_in = match tail {
        Some((_, b)) if b < T::zero() => (-b).min(T::lit(20.0)),
        _ => T::half(),
    };
    let t_in = match early {
        Some((s, _)) if -s > T::one() / t_res => n_in.max(T::lit(0.05)) / (-s - T::one() / t_res),
        _ => t_res / T::lit(3.0),
    };
    let mut out = vec![[n_in.max(T::lit(0.05)), t_in, t_res]];
    for &(nn, frac) in &[(T::half(), T::lit(0.2)), (T::lit(2.0), T::half())] {
        out.push([nn, t_res * frac, t_res]);
    }
    out
}
