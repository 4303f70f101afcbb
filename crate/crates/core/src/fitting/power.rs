//! Power-sweep fits of the TLS saturation model.

use serde::{Deserialize, Serialize};

use super::{fit_nls, Bound, Dataset, FitError, FitResult, FnModel, NlsOptions};
use crate::lossmodels::thermal_factor;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSweepPoint<T> {
    pub n_photons: T,
    pub q_internal: T,
    pub q_sigma: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSweepOptions<T> {
    pub frequency_hz: T,
    pub temperature_k: T,
    /// Fit `ln Q` instead of `Q`; uncertainties become `q_sigma / q`.
    pub log_residuals: bool,
}

impl<T: Real> PowerSweepOptions<T> {
    pub fn new(frequency_hz: T, temperature_k: T) -> Self {
        Self { frequency_hz, temperature_k, log_residuals: false }
    }

    pub fn log(mut self) -> Self {
        self.log_residuals = true;
        self
    }
}

const NAMES: [&str; 4] = ["q_low", "q_high", "n_c", "beta"];

/// Fits `(q_low, q_high, n_c, beta)` with `beta` restricted to `[0.1, 1]`.
///
/// Internally the three scale parameters are fitted as logarithms. Several
/// starting points derived from the endpoint Qs are tried and the lowest
/// cost wins.
pub fn fit_power_sweep<T: Real>(
    points: &[PowerSweepPoint<T>],
    opts: &PowerSweepOptions<T>,
) -> Result<FitResult<T>, FitError> {
    if points.len() < 6 {
        return Err(FitError::InvalidData(format!("a power sweep needs at least 6 points, got {}", points.len())));
    }
    if let Some(i) = points.iter().position(|p| !(p.n_photons >= T::zero() && p.q_internal > T::zero())) {
        return Err(FitError::InvalidData(format!("point {i}: need n >= 0 and Q > 0")));
    }
    if !(opts.frequency_hz > T::zero() && opts.temperature_k >= T::zero()) {
        return Err(FitError::InvalidData("frequency must be positive and temperature non-negative".into()));
    }
    let have_sigma = points.iter().all(|p| p.q_sigma.is_some());
    if !have_sigma && points.iter().any(|p| p.q_sigma.is_some()) {
        return Err(FitError::InvalidData("q_sigma must be given for all points or none".into()));
    }
    let th = thermal_factor(opts.frequency_hz, opts.temperature_k);
    let log = opts.log_residuals;

    let x: Vec<T> = points.iter().map(|p| p.n_photons).collect();
    let y: Vec<T> = points.iter().map(|p| if log { p.q_internal.ln() } else { p.q_internal }).collect();
    let mut data = Dataset::new(x, y);
    if have_sigma {
        let s = points
            .iter()
            .map(|p| {
                let s = p.q_sigma.unwrap_or(T::one());
                if log {
                    s / p.q_internal
                } else {
                    s
                }
            })
            .collect();
        data = data.with_sigma(s);
    }

    let id = if log { "tls_power_log" } else { "tls_power_linear" };
    let model = FnModel::new(id, &["ln_q_low", "ln_q_high", "ln_n_c", "beta"], move |n: T, u: &[T]| {
        let inv = th * (-u[0]).exp() / (T::one() + n / u[2].exp()).powf(u[3]) + (-u[1]).exp();
        if log {
            -inv.ln()
        } else {
            T::one() / inv
        }
    });

    let bounds = [
        Bound::new(T::zero(), T::lit(30.0)),
        Bound::new(T::zero(), T::lit(30.0)),
        Bound::new(T::lit(-15.0), T::lit(30.0)),
        Bound::new(T::lit(0.1), T::one()),
    ];
    let nls = NlsOptions::default();
    let mut best: Option<FitResult<T>> = None;
    let mut last_err = None;
    for init in initial_guesses(points, th) {
        let init: Vec<T> = init.iter().zip(&bounds).map(|(&v, b)| v.max(b.lo).min(b.hi)).collect();
        match fit_nls(&model, &init, &bounds, &data, &nls) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.residual_norm < b.residual_norm) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let fit =
        best.ok_or_else(|| last_err.unwrap_or(FitError::NoConvergence { iterations: 0, residual_norm: f64::NAN }))?;
    let u = fit.params.clone();
    let values = vec![u[0].exp(), u[1].exp(), u[2].exp(), u[3]];
    let mut jac = vec![vec![T::zero(); 4]; 4];
    for i in 0..3 {
        jac[i][i] = values[i];
    }
    jac[3][3] = T::one();
    let id = if log { "tls_power_log" } else { "tls_power_linear" };
    Ok(fit.reparameterize(id, &NAMES, values, &jac))
}

fn initial_guesses<T: Real>(points: &[PowerSweepPoint<T>], th: T) -> Vec<[T; 4]> {
    let mut sorted: Vec<_> = points.iter().map(|p| (p.n_photons, p.q_internal)).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let k = (sorted.len() / 6).max(1);
    let mean_inv = |s: &[(T, T)]| s.iter().map(|p| T::one() / p.1).sum::<T>() / T::from_usize_lossy(s.len());
    let inv_lo = mean_inv(&sorted[..k]);
    let inv_hi = mean_inv(&sorted[sorted.len() - k..]);
    let q_high = T::one() / inv_hi * T::lit(1.05);
    let tls = inv_lo - T::one() / q_high;
    let q_low = if tls > T::zero() { th / tls } else { T::one() / inv_lo * T::lit(10.0) };

    // Photon number where 1/Q is halfway between the endpoints.
    let mid = (inv_lo + inv_hi) * T::half();
    let mut n_mid = None;
    for w in sorted.windows(2) {
        let (a, b) = (T::one() / w[0].1, T::one() / w[1].1);
        if (a - mid) * (b - mid) <= T::zero() && w[0].0 > T::zero() {
            let t = if a != b { (a - mid) / (a - b) } else { T::half() };
            n_mid = Some((w[0].0.ln() + t * (w[1].0.ln() - w[0].0.ln())).exp());
            break;
        }
    }
    let positive: Vec<T> = sorted.iter().map(|p| p.0).filter(|&n| n > T::zero()).collect();
    let geo = if positive.is_empty() {
        T::one()
    } else {
        (positive.iter().map(|n| n.ln()).sum::<T>() / T::from_usize_lossy(positive.len())).exp()
    };
    let n_mid = n_mid.unwrap_or(geo);

    let mut out = Vec::new();
    for &beta in &[T::lit(0.4), T::lit(0.8)] {
        // At n = n_mid the TLS term is halved: (1 + n/n_c)^beta = 2.
        let n_c = n_mid / (T::two().powf(T::one() / beta) - T::one());
        for &scale in &[T::one(), T::lit(0.1), T::lit(10.0)] {
            out.push([q_low.ln(), q_high.ln(), (n_c * scale).ln(), beta]);
        }
    }
    out
}
