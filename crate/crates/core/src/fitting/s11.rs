//! Single-port reflection fits.
//!
//! Model, with `kappa = kappa_int + kappa_ext` and linewidths in rad/s:
//!
//! ```text
//! S11(f) = a e^{i phi} e^{-2 pi i f tau} [1 - (2 kappa_ext / kappa) / (1 + 2i (f - f0) / (kappa / 2 pi))]
//! ```
//!
//! The fit runs in scaled coordinates: frequencies relative to the span
//! centre in units of a guessed linewidth, and the baseline phase referred to
//! the span centre. Results and covariance are mapped back to
//! `(f0, Q_int, Q_ext, a, phi, tau)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{fit_nls, Bound, Dataset, FitError, FitResult, FnModel, NlsOptions};
use crate::scalar::Real;

/// Complex reflection coefficient versus frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceTrace<T> {
    pub freq_hz: Vec<T>,
    pub s11: Vec<Complex<T>>,
}

impl<T: Real> ResonanceTrace<T> {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.freq_hz.len() != self.s11.len() {
            return Err(FitError::InvalidData(format!(
                "{} frequencies but {} S11 values",
                self.freq_hz.len(),
                self.s11.len()
            )));
        }
        if self.freq_hz.len() < 10 {
            return Err(FitError::InvalidData("a reflection trace needs at least 10 points".into()));
        }
        if let Some(i) = self.freq_hz.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(FitError::InvalidData(format!("frequencies must increase strictly (row {})", i + 1)));
        }
        if let Some(i) = self.s11.iter().position(|z| !(z.norm() <= T::lit(1.5))) {
            return Err(FitError::InvalidData(format!("|S11| at row {i} is not finite or exceeds 1.5")));
        }
        Ok(())
    }
}

/// Physical reflection parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct S11Params<T> {
    pub f0_hz: T,
    pub q_int: T,
    pub q_ext: T,
    pub amplitude: T,
    pub phase_rad: T,
    pub delay_s: T,
}

/// Optional user starting values; missing entries come from the heuristics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct S11Guess<T> {
    pub f0_hz: Option<T>,
    pub q_int: Option<T>,
    pub q_ext: Option<T>,
    pub delay_s: Option<T>,
}

pub fn s11_model<T: Real>(f: T, p: &S11Params<T>) -> Complex<T> {
    let two_pi = T::two() * T::PI();
    let k_int = p.f0_hz / p.q_int;
    let k_ext = p.f0_hz / p.q_ext;
    let k = k_int + k_ext;
    let baseline = Complex::from_polar(p.amplitude, p.phase_rad - two_pi * f * p.delay_s);
    let lorentz = Complex::new(T::one(), T::two() * (f - p.f0_hz) / k);
    baseline * (Complex::new(T::one(), T::zero()) - Complex::new(T::two() * k_ext / k, T::zero()) / lorentz)
}

/// Scaled model: `x = (f - f_ref) / w`, parameters
/// `[x0, k_int/w, k_ext/w, a, psi, tau w]` with linewidths in Hz.
fn scaled_model<T: Real>(x: T, u: &[T]) -> Complex<T> {
    let two_pi = T::two() * T::PI();
    let k = u[1] + u[2];
    let baseline = Complex::from_polar(u[3], u[4] - two_pi * x * u[5]);
    let lorentz = Complex::new(T::one(), T::two() * (x - u[0]) / k);
    baseline * (Complex::new(T::one(), T::zero()) - Complex::new(T::two() * u[2] / k, T::zero()) / lorentz)
}

const NAMES: [&str; 6] = ["f0_hz", "q_int", "q_ext", "amplitude", "phase_rad", "delay_s"];

fn wrap_phase<T: Real>(p: T) -> T {
    let two_pi = T::two() * T::PI();
    let mut v = p % two_pi;
    if v > T::PI() {
        v -= two_pi;
    } else if v <= -T::PI() {
        v += two_pi;
    }
    v
}

struct Baseline<T> {
    amplitude: T,
    phase: T,
    delay: T,
    noise: T,
}

fn unwrap<T: Real>(z: &[Complex<T>]) -> Vec<T> {
    let two_pi = T::two() * T::PI();
    let mut out = Vec::with_capacity(z.len());
    let mut offset = T::zero();
    let mut prev = None;
    for v in z {
        let a = v.arg();
        if let Some(p) = prev {
            let d = a - p;
            if d > T::PI() {
                offset -= two_pi;
            } else if d < -T::PI() {
                offset += two_pi;
            }
        }
        prev = Some(a);
        out.push(a + offset);
    }
    out
}

fn slope<T: Real>(x: &[T], y: &[T]) -> T {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxx: T = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    if sxx > T::zero() {
        sxy / sxx
    } else {
        T::zero()
    }
}

/// Delay from the phase slope of the trace edges, then amplitude and phase
/// from the delay-corrected edge points.
fn estimate_baseline<T: Real>(x: &[T], z: &[Complex<T>], delay_hint: Option<T>) -> Baseline<T> {
    let n = x.len();
    let m = (n / 10).max(3).min(n / 2);
    let two_pi = T::two() * T::PI();
    let delay = delay_hint.unwrap_or_else(|| {
        let lo = unwrap(&z[..m]);
        let hi = unwrap(&z[n - m..]);
        let s = (slope(&x[..m], &lo) + slope(&x[n - m..], &hi)) * T::half();
        -s / two_pi
    });
    let edges: Vec<Complex<T>> =
        (0..m).chain(n - m..n).map(|i| z[i] * Complex::from_polar(T::one(), two_pi * x[i] * delay)).collect();
    let amplitude = edges.iter().map(|v| v.norm()).sum::<T>() / T::from_usize_lossy(edges.len());
    let mean = edges.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
    let phase = mean.arg();
    // Successive differences cancel the smooth tails; sqrt(2) for the pair.
    let diffs: Vec<T> = edges[..m].windows(2).chain(edges[m..].windows(2)).map(|w| (w[1] - w[0]).norm_sqr()).collect();
    let noise = if diffs.is_empty() {
        T::zero()
    } else {
        (diffs.iter().copied().sum::<T>() / T::from_usize_lossy(diffs.len()) / T::two()).sqrt()
    };
    Baseline { amplitude, phase, delay, noise }
}

/// Fits the reflection model jointly to both quadratures.
pub fn fit_s11<T: Real>(trace: &ResonanceTrace<T>, guess: Option<&S11Guess<T>>) -> Result<FitResult<T>, FitError> {
    trace.validate()?;
    let g = guess.copied().unwrap_or_default();
    let f = &trace.freq_hz;
    let n = f.len();
    let f_ref = (f[0] + f[n - 1]) * T::half();
    let span = f[n - 1] - f[0];
    let two_pi = T::two() * T::PI();

    // First pass in units of the span to locate the dip.
    let xs: Vec<T> = f.iter().map(|&v| (v - f_ref) / span).collect();
    let base = estimate_baseline(&xs, &trace.s11, g.delay_s.map(|d| d * span));
    let norm = |i: usize, b: &Baseline<T>, x: &[T]| {
        Complex::new(T::one(), T::zero())
            - trace.s11[i] * Complex::from_polar(T::one() / b.amplitude, two_pi * x[i] * b.delay - b.phase)
    };
    let d: Vec<T> = (0..n).map(|i| norm(i, &base, &xs).norm()).collect();
    let (imax, &depth) =
        d.iter().enumerate().fold((0, &T::zero()), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let noise = base.noise / base.amplitude.max(T::min_positive_value());
    if !(depth >= T::lit(3.0) * noise) || depth == T::zero() {
        return Err(FitError::NoResonanceFound { depth: depth.to_f64_lossy(), noise: noise.to_f64_lossy() });
    }
    let f0 = g.f0_hz.unwrap_or(f[imax]);
    // Full width at half maximum of |d|^2 equals kappa / 2 pi.
    let half = depth * depth * T::half();
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<T> {
        let mut prev = imax;
        for i in range {
            if d[i] * d[i] < half {
                let (a, b) = (d[prev] * d[prev], d[i] * d[i]);
                let t = (a - half) / (a - b);
                return Some(f[prev] + t * (f[i] - f[prev]));
            }
            prev = i;
        }
        None
    };
    let lo = crossing(&mut (0..imax).rev());
    let hi = crossing(&mut (imax + 1..n));
    let width = match (lo, hi) {
        (Some(a), Some(b)) => b - a,
        (Some(a), None) => T::two() * (f0 - a),
        (None, Some(b)) => T::two() * (b - f0),
        (None, None) => span / T::lit(10.0),
    }
    .max(span * T::lit(1e-4));
    let mut k_ext = (depth * T::half()).min(T::lit(0.99)) * width;
    let mut k_int = (width - k_ext).max(T::lit(0.05) * width);
    if let Some(q) = g.q_ext {
        k_ext = f0 / q;
    }
    if let Some(q) = g.q_int {
        k_int = f0 / q;
    }

    // Second pass in units of the guessed linewidth.
    let w = k_int + k_ext;
    let x: Vec<T> = f.iter().map(|&v| (v - f_ref) / w).collect();
    let base = estimate_baseline(&x, &trace.s11, Some(base.delay * w / span));
    let init = [(f0 - f_ref) / w, k_int / w, k_ext / w, base.amplitude, base.phase, base.delay];
    let (x_lo, x_hi) = (x[0], x[n - 1]);
    let bounds = [
        Bound::new(x_lo, x_hi),
        Bound::new(T::lit(1e-9), T::lit(1e6)),
        Bound::new(T::lit(1e-9), T::lit(1e6)),
        Bound::new(T::zero(), T::lit(10.0)),
        Bound::new(base.phase - T::lit(7.0), base.phase + T::lit(7.0)),
        Bound::new(T::lit(-1e6), T::lit(1e6)),
    ];
    let init: Vec<T> = init.iter().zip(&bounds).map(|(&v, b)| v.max(b.lo).min(b.hi)).collect();
    let data = Dataset::new(x, trace.s11.clone());
    let model = FnModel::new("s11_reflection", &["x0", "k_int", "k_ext", "a", "psi", "tau"], scaled_model::<T>);
    let fit = fit_nls(&model, &init, &bounds, &data, &NlsOptions::default())?;

    let u = fit.params.clone();
    let f0 = f_ref + u[0] * w;
    let (ki, ke) = (u[1] * w, u[2] * w);
    let delay = u[5] / w;
    let values = vec![f0, f0 / ki, f0 / ke, u[3], wrap_phase(u[4] + two_pi * f_ref * delay), delay];
    let z = T::zero();
    let jac = vec![
        vec![w, z, z, z, z, z],
        vec![w / ki, -f0 / (ki * u[1]), z, z, z, z],
        vec![w / ke, z, -f0 / (ke * u[2]), z, z, z],
        vec![z, z, z, T::one(), z, z],
        vec![z, z, z, z, T::one(), two_pi * f_ref / w],
        vec![z, z, z, z, z, T::one() / w],
    ];
    Ok(fit.reparameterize("s11_reflection", &NAMES, values, &jac))
}

impl<T: Real> S11Params<T> {
    pub fn from_fit(r: &FitResult<T>) -> Option<Self> {
        Some(Self {
            f0_hz: r.get("f0_hz")?,
            q_int: r.get("q_int")?,
            q_ext: r.get("q_ext")?,
            amplitude: r.get("amplitude")?,
            phase_rad: r.get("phase_rad")?,
            delay_s: r.get("delay_s")?,
        })
    }
}
