//! Fits across a gap sweep: surface loss tangent from low-power Qs and the
//! coherent-TLS field law from high-power Qs.

use serde::{Deserialize, Serialize};

use super::{fit_nls, Bound, Dataset, FitError, FitResult, FnModel, NlsOptions};
use crate::fieldsolver::ThinLayerSpec;
use crate::scalar::Real;

/// Relative RMS misfit of Q above which a loss-tangent fit is flagged as
/// inconsistent with the participation model.
pub const LOSS_TANGENT_CONSISTENCY_LIMIT: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossTangentFit<T> {
    /// `(tan_delta_ma)`.
    pub result: FitResult<T>,
    /// RMS of `Q_model / Q - 1` over the points.
    pub relative_rms: T,
    pub consistent: bool,
}

/// Single-parameter fit of `1/Q = s_MA eps t tan_delta` to `(gap, Q)` points
/// with their simulated sensitivities `s_ma` (1/m).
///
/// The fit runs on `1/Q`; `q_sigma` (absolute Q uncertainties) become
/// `q_sigma / Q^2` there.
pub fn fit_loss_tangent<T: Real>(
    gap_points: &[(T, T)],
    s_ma: &[T],
    layer: &ThinLayerSpec<T>,
    q_sigma: Option<&[T]>,
) -> Result<LossTangentFit<T>, FitError> {
    if gap_points.len() < 2 {
        return Err(FitError::InvalidData("a loss-tangent fit needs at least 2 gaps".into()));
    }
    if s_ma.len() != gap_points.len() {
        return Err(FitError::InvalidData(format!("{} sensitivities for {} gaps", s_ma.len(), gap_points.len())));
    }
    if gap_points.iter().any(|&(_, q)| !(q > T::zero())) || s_ma.iter().any(|&s| !(s > T::zero())) {
        return Err(FitError::InvalidData("Q values and sensitivities must be positive".into()));
    }
    layer.validate().map_err(|e| FitError::InvalidData(e.to_string()))?;
    let et = layer.eps_layer * layer.thickness_m;
    let y: Vec<T> = gap_points.iter().map(|&(_, q)| T::one() / q).collect();
    // Closed-form unweighted estimate anchors the internal scale.
    let num: T = s_ma.iter().zip(&y).map(|(&s, &v)| s * et * v).sum();
    let den: T = s_ma.iter().map(|&s| (s * et) * (s * et)).sum();
    let tan0 = num / den;
    let mut data = Dataset::new(s_ma.to_vec(), y);
    if let Some(s) = q_sigma {
        if s.len() != gap_points.len() {
            return Err(FitError::InvalidData("one Q uncertainty per gap is required".into()));
        }
        data = data.with_sigma(s.iter().zip(gap_points).map(|(&s, &(_, q))| s / (q * q)).collect());
    }
    let model = FnModel::new("loss_tangent", &["u"], move |s: T, u: &[T]| s * et * tan0 * u[0]);
    let fit = fit_nls(&model, &[T::one()], &[Bound::new(T::zero(), T::lit(1e6))], &data, &NlsOptions::default())?;
    let u = fit.params[0];
    let result = fit.reparameterize("loss_tangent", &["tan_delta_ma"], vec![u * tan0], &[vec![tan0]]);
    let tan = result.params[0];
    let ms: T = gap_points
        .iter()
        .zip(s_ma)
        .map(|(&(_, q), &s)| {
            let q_model = T::one() / (s * et * tan);
            let d = q_model / q - T::one();
            d * d
        })
        .sum::<T>()
        / T::from_usize_lossy(gap_points.len());
    let relative_rms = ms.sqrt();
    Ok(LossTangentFit { result, relative_rms, consistent: relative_rms <= T::lit(LOSS_TANGENT_CONSISTENCY_LIMIT) })
}

/// Two-parameter fit of `Q = q0 sqrt(1 + (xi/T) E^2)` to `(E, Q)` points.
///
/// Residuals are taken on `ln Q`. The start comes from a straight-line fit of
/// `Q^2` against `E^2`.
pub fn fit_coherent_tls<T: Real>(points: &[(T, T)], temperature_k: T) -> Result<FitResult<T>, FitError> {
    if points.len() < 3 {
        return Err(FitError::InvalidData("a coherent-TLS fit needs at least 3 points".into()));
    }
    if points.iter().any(|&(e, q)| !(e > T::zero() && q > T::zero())) {
        return Err(FitError::InvalidData("fields and Q values must be positive".into()));
    }
    if !(temperature_k > T::zero()) {
        return Err(FitError::InvalidData("temperature must be positive".into()));
    }
    let n = T::from_usize_lossy(points.len());
    let xs: Vec<T> = points.iter().map(|&(e, _)| e * e).collect();
    let ys: Vec<T> = points.iter().map(|&(_, q)| q * q).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = my - slope * mx;
    let q_min = points.iter().map(|p| p.1).fold(T::infinity(), T::min);
    let q0 = if intercept > T::zero() { intercept.sqrt() } else { q_min * T::half() };
    let xi0 = if slope > T::zero() { slope / (q0 * q0) * temperature_k } else { T::lit(1e-6) * temperature_k };

    let data = Dataset::new(points.iter().map(|p| p.0).collect(), points.iter().map(|p| p.1.ln()).collect());
    let model = FnModel::new("coherent_tls", &["a", "b"], move |e: T, u: &[T]| {
        (q0 * u[0]).ln() + T::half() * (T::one() + xi0 * u[1] / temperature_k * e * e).ln()
    });
    let bounds = [Bound::new(T::lit(1e-6), T::lit(1e6)), Bound::new(T::zero(), T::lit(1e9))];
    let fit = fit_nls(&model, &[T::one(), T::one()], &bounds, &data, &NlsOptions::default())?;
    let (a, b) = (fit.params[0], fit.params[1]);
    Ok(fit.reparameterize(
        "coherent_tls",
        &["q0", "xi_k_m2_per_v2"],
        vec![q0 * a, xi0 * b],
        &[vec![q0, T::zero()], vec![T::zero(), xi0]],
    ))
}
