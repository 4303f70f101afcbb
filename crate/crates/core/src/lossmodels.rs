//! TLS loss and decay models: power-dependent resonator Q, loss-tangent
//! budgets, double-exponential qubit decay and the coherent-TLS field law.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{consts, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LossModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("loss budget has no channels")]
    EmptyBudget,
    #[error("infeasible: known losses {known:e} already reach the measured loss {measured:e}")]
    Infeasible { known: f64, measured: f64 },
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), LossModelError> {
    if ok {
        Ok(())
    } else {
        Err(LossModelError::InvalidParams(msg()))
    }
}

/// `tanh(h f / 2 k T)`; unity at zero temperature.
pub fn thermal_factor<T: Real>(frequency_hz: T, temperature_k: T) -> T {
    if temperature_k <= T::zero() {
        return T::one();
    }
    let x = T::lit(consts::PLANCK) * frequency_hz / (T::two() * T::lit(consts::BOLTZMANN) * temperature_k);
    x.tanh()
}

/// Power-dependent resonator quality factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TlsPowerModel<T> {
    pub q_low: T,
    pub q_high: T,
    /// Critical photon number.
    pub n_c: T,
    pub beta: T,
    pub frequency_hz: T,
    pub temperature_k: T,
}

impl<T: Real> TlsPowerModel<T> {
    pub fn validate(&self) -> Result<(), LossModelError> {
        check(self.q_low > T::zero() && self.q_high > T::zero() && self.n_c > T::zero(), || {
            format!("q_low, q_high and n_c must be positive: {self:?}")
        })?;
        check(self.beta > T::zero() && self.beta <= T::one(), || {
            format!("beta must lie in (0, 1], got {}", self.beta)
        })?;
        check(self.frequency_hz > T::zero() && self.temperature_k >= T::zero(), || {
            "frequency must be positive and temperature non-negative".into()
        })
    }
}

/// Quality factor at mean photon number `n`:
/// `1/Q = tanh(hf/2kT) / (q_low (1 + n/n_c)^beta) + 1/q_high`.
pub fn q_total<T: Real>(n: T, m: &TlsPowerModel<T>) -> T {
    let th = thermal_factor(m.frequency_hz, m.temperature_k);
    let tls = th / (m.q_low * (T::one() + n / m.n_c).powf(m.beta));
    T::one() / (tls + T::one() / m.q_high)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossChannel<T> {
    pub label: String,
    pub participation: T,
    pub tan_delta: T,
}

/// Participation-weighted dielectric loss channels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossBudget<T> {
    pub channels: Vec<LossChannel<T>>,
}

impl<T: Real> LossBudget<T> {
    pub fn new() -> Self {
        Self { channels: Vec::new() }
    }

    pub fn with_channel(mut self, label: impl Into<String>, participation: T, tan_delta: T) -> Self {
        self.channels.push(LossChannel { label: label.into(), participation, tan_delta });
        self
    }

    pub fn validate(&self) -> Result<(), LossModelError> {
        if self.channels.is_empty() {
            return Err(LossModelError::EmptyBudget);
        }
        for c in &self.channels {
            check(c.participation >= T::zero() && c.participation <= T::one(), || {
                format!("participation of '{}' must lie in [0, 1], got {}", c.label, c.participation)
            })?;
            check(c.tan_delta >= T::zero(), || format!("tan delta of '{}' must be non-negative", c.label))?;
        }
        Ok(())
    }

    /// `sum p_i tan_delta_i`.
    pub fn inverse_q(&self) -> T {
        self.channels.iter().map(|c| c.participation * c.tan_delta).sum()
    }
}

/// A quality factor that may be unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityFactor<T> {
    Finite(T),
    Lossless,
}

impl<T: Real> QualityFactor<T> {
    pub fn from_inverse(inv_q: T) -> Self {
        if inv_q > T::zero() {
            QualityFactor::Finite(T::one() / inv_q)
        } else {
            QualityFactor::Lossless
        }
    }

    pub fn value(self) -> Option<T> {
        match self {
            QualityFactor::Finite(q) => Some(q),
            QualityFactor::Lossless => None,
        }
    }
}

/// `1/Q = sum p_i tan_delta_i`; a zero sum is reported as [`QualityFactor::Lossless`].
pub fn q_tls_budget<T: Real>(budget: &LossBudget<T>) -> Result<QualityFactor<T>, LossModelError> {
    budget.validate()?;
    Ok(QualityFactor::from_inverse(budget.inverse_q()))
}

/// Solves the budget for the loss tangent of channel `unknown` given a
/// measured quality factor. The stored tan delta of that channel is ignored.
pub fn solve_unknown_tan_delta<T: Real>(
    measured_q: T,
    budget: &LossBudget<T>,
    unknown: usize,
) -> Result<T, LossModelError> {
    budget.validate()?;
    check(measured_q > T::zero(), || format!("measured Q must be positive, got {measured_q}"))?;
    let target = budget
        .channels
        .get(unknown)
        .ok_or_else(|| LossModelError::InvalidParams(format!("no channel with index {unknown}")))?;
    check(target.participation > T::zero(), || format!("unknown channel '{}' has zero participation", target.label))?;
    let known: T = budget
        .channels
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != unknown)
        .map(|(_, c)| c.participation * c.tan_delta)
        .sum();
    let measured = T::one() / measured_q;
    if known >= measured {
        return Err(LossModelError::Infeasible { known: known.to_f64_lossy(), measured: measured.to_f64_lossy() });
    }
    Ok((measured - known) / target.participation)
}

/// Qubit relaxation coupled to a bath of long-lived TLS.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpModel<T> {
    /// Mean number of TLS in the initial coupling window.
    pub n_in: T,
    pub t1_in_s: T,
    pub t1_res_s: T,
}

impl<T: Real> DoubleExpModel<T> {
    pub fn validate(&self) -> Result<(), LossModelError> {
        check(self.n_in >= T::zero() && self.t1_in_s > T::zero() && self.t1_res_s > T::zero(), || {
            format!("need n_in >= 0 and positive time constants: {self:?}")
        })
    }
}

/// `P(t) = exp(n_in (exp(-t/t1_in) - 1)) exp(-t/t1_res)`.
pub fn decay_population<T: Real>(t: T, m: &DoubleExpModel<T>) -> T {
    (m.n_in * (-t / m.t1_in_s).exp_m1() - t / m.t1_res_s).exp()
}

/// Field-dependent TLS quality factor in the low-temperature limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentTlsModel<T> {
    pub q0: T,
    pub xi_k_m2_per_v2: T,
    pub temperature_k: T,
}

impl<T: Real> CoherentTlsModel<T> {
    pub fn validate(&self) -> Result<(), LossModelError> {
        check(self.q0 > T::zero() && self.xi_k_m2_per_v2 >= T::zero() && self.temperature_k > T::zero(), || {
            format!("need q0 > 0, xi >= 0, T > 0: {self:?}")
        })
    }
}

/// `Q = q0 sqrt(1 + (xi/T) E^2)`.
pub fn q_coherent_tls<T: Real>(e_field: T, m: &CoherentTlsModel<T>) -> T {
    m.q0 * (T::one() + m.xi_k_m2_per_v2 / m.temperature_k * e_field * e_field).sqrt()
}
