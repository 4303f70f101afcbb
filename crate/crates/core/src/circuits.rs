//! Lumped-element transmon and LC resonator algebra.
//!
//! Energies are expressed as frequencies (`E / h`, Hz) and loss rates as
//! angular rates (rad/s).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{consts, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("invalid circuit parameters: {0}")]
    InvalidParams(String),
}

/// `E_C / h = e^2 / (2 C h)`, Hz.
pub fn charging_energy<T: Real>(c_total_f: T) -> T {
    let e = T::lit(consts::ELEMENTARY_CHARGE);
    e * e / (T::two() * c_total_f * T::lit(consts::PLANCK))
}

/// Inverse of [`charging_energy`]: capacitance in F for `E_C / h` in Hz.
pub fn capacitance_from_charging_energy<T: Real>(e_c_hz: T) -> T {
    let e = T::lit(consts::ELEMENTARY_CHARGE);
    e * e / (T::two() * e_c_hz * T::lit(consts::PLANCK))
}

/// Leading-order transmon transition frequency `sqrt(8 E_J E_C) - E_C`, Hz.
pub fn transmon_frequency<T: Real>(e_c_hz: T, e_j_hz: T) -> T {
    (T::lit(8.0) * e_j_hz * e_c_hz).sqrt() - e_c_hz
}

/// `1 / (2 pi sqrt(L C))`, Hz.
pub fn lc_frequency<T: Real>(inductance_h: T, capacitance_f: T) -> T {
    T::one() / (T::two() * T::PI() * (inductance_h * capacitance_f).sqrt())
}

/// Capacitance that resonates with `inductance_h` at `frequency_hz`.
pub fn capacitance_for_frequency<T: Real>(inductance_h: T, frequency_hz: T) -> T {
    let w = T::two() * T::PI() * frequency_hz;
    T::one() / (w * w * inductance_h)
}

/// `Q = 2 pi f T1`.
pub fn q_from_t1<T: Real>(frequency_hz: T, t1_s: T) -> T {
    T::two() * T::PI() * frequency_hz * t1_s
}

/// Quality factor per footprint area, 1/m^2. Multiply by `1e-12` for 1/um^2.
pub fn q_per_area<T: Real>(q: T, area_m2: T) -> T {
    q / area_m2
}

pub fn dbm_to_watts<T: Real>(power_dbm: T) -> T {
    T::lit(1e-3) * T::lit(10.0).powf(power_dbm / T::lit(10.0))
}

/// Power reaching the device after `attenuation_db` of line loss.
pub fn power_at_device<T: Real>(source_dbm: T, attenuation_db: T) -> T {
    dbm_to_watts(source_dbm - attenuation_db)
}

/// Steady-state photon number of a single-port resonator driven at detuning
/// `detuning` (rad/s):
/// `n = 4 k_ext P / (hbar 2 pi f0 ((k_int + k_ext)^2 + 4 detuning^2))`.
pub fn photon_number<T: Real>(power_w: T, f0_hz: T, kappa_int: T, kappa_ext: T, detuning: T) -> T {
    let kappa = kappa_int + kappa_ext;
    let hw = T::lit(consts::HBAR) * T::two() * T::PI() * f0_hz;
    T::lit(4.0) * kappa_ext * power_w / (hw * (kappa * kappa + T::lit(4.0) * detuning * detuning))
}

/// Transmon parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams<T> {
    pub c_total_f: T,
    pub e_c_hz: T,
    pub e_j_hz: T,
    pub f_ge_hz: T,
    pub footprint_area_m2: T,
}

impl<T: Real> TransmonParams<T> {
    /// Derives capacitance and transition frequency from the energies.
    pub fn from_energies(e_c_hz: T, e_j_hz: T, footprint_area_m2: T) -> Result<Self, CircuitError> {
        let p = Self {
            c_total_f: capacitance_from_charging_energy(e_c_hz),
            e_c_hz,
            e_j_hz,
            f_ge_hz: transmon_frequency(e_c_hz, e_j_hz),
            footprint_area_m2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let all_positive = [self.c_total_f, self.e_c_hz, self.e_j_hz, self.f_ge_hz, self.footprint_area_m2]
            .iter()
            .all(|&v| v > T::zero() && v.is_finite());
        if !all_positive {
            return Err(CircuitError::InvalidParams(format!("transmon parameters must be positive: {self:?}")));
        }
        if self.e_j_hz <= self.e_c_hz {
            return Err(CircuitError::InvalidParams("E_J must exceed E_C".into()));
        }
        Ok(())
    }

    /// `E_J / E_C >= 10`; below that the asymptotic frequency formula is poor.
    pub fn in_transmon_regime(&self) -> bool {
        self.e_j_hz / self.e_c_hz >= T::lit(10.0)
    }

    pub fn q_from_t1(&self, t1_s: T) -> T {
        q_from_t1(self.f_ge_hz, t1_s)
    }
}

/// Lumped LC resonator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonatorLc<T> {
    pub inductance_h: T,
    pub capacitance_f: T,
    pub f_r_hz: T,
    pub kappa_int_rad_s: T,
    pub kappa_ext_rad_s: T,
}

impl<T: Real> ResonatorLc<T> {
    pub fn new(
        inductance_h: T,
        capacitance_f: T,
        kappa_int_rad_s: T,
        kappa_ext_rad_s: T,
    ) -> Result<Self, CircuitError> {
        if !(inductance_h > T::zero() && capacitance_f > T::zero()) {
            return Err(CircuitError::InvalidParams("L and C must be positive".into()));
        }
        if !(kappa_int_rad_s >= T::zero() && kappa_ext_rad_s >= T::zero()) {
            return Err(CircuitError::InvalidParams("loss rates must be non-negative".into()));
        }
        Ok(Self {
            inductance_h,
            capacitance_f,
            f_r_hz: lc_frequency(inductance_h, capacitance_f),
            kappa_int_rad_s,
            kappa_ext_rad_s,
        })
    }

    pub fn q_internal(&self) -> T {
        T::two() * T::PI() * self.f_r_hz / self.kappa_int_rad_s
    }

    pub fn photon_number(&self, power_w: T, detuning: T) -> T {
        photon_number(power_w, self.f_r_hz, self.kappa_int_rad_s, self.kappa_ext_rad_s, detuning)
    }
}

#[cfg(test)]
// Oracle values are frozen at full printed precision.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn charging_energy_reference_values() {
        assert!(rel(charging_energy(42e-15), 461195936.301407777) < 1e-12);
        assert!(rel(charging_energy(56.6e-15), 342230200.082316725) < 1e-12);
        assert!(rel(charging_energy(84e-15), charging_energy(42e-15) / 2.0) < 1e-14);
        let c = 37.3e-15;
        assert!(rel(capacitance_from_charging_energy(charging_energy(c)), c) < 1e-12);
    }

    #[test]
    fn table_two_frequencies() {
        let rows: [(f64, f64, f64); 4] =
            [(461e6, 11.11e9, 5.94e9), (389e6, 10.51e9, 5.33e9), (362e6, 11.51e9, 5.41e9), (342e6, 10.28e9, 4.96e9)];
        for (ec, ej, f) in rows {
            assert!((transmon_frequency(ec, ej) - f).abs() < 20e6);
        }
        assert!(rel(transmon_frequency(461e6, 11.11e9), 5940068660.77844832) < 1e-12);
    }

    #[test]
    fn lc_reference_values() {
        assert!(rel(lc_frequency(5e-9, 50e-15), 10065842420.8974070) < 1e-12);
        assert!(rel(lc_frequency(5e-9, 200e-15), lc_frequency(5e-9, 50e-15) / 2.0) < 1e-14);
        assert!(rel(capacitance_for_frequency(5e-9, 9.1e9), 6.11769011244642987e-14) < 1e-12);
    }

    #[test]
    fn quality_factor_reference_values() {
        assert!(rel(q_from_t1(5.94e9, 0.71e-6), 26498.7057144991880) < 1e-12);
        assert!(rel(q_from_t1(5.94e9, 7.23e-6), 269838.932839195957) < 1e-12);
        let area = 39e-6 * 36e-6;
        assert!(rel(q_per_area(q_from_t1(5.94e9, 0.71e-6), area) * 1e-12, 18.8737220188740655) < 1e-12);
        assert!(rel(q_per_area(q_from_t1(5.94e9, 1.23e-6), area) * 1e-12, 32.6967296946691558) < 1e-12);
    }

    #[test]
    fn photon_number_reference_values() {
        let kappa = 2.0 * PI * 0.6e6;
        let p = dbm_to_watts(-140.0);
        let n = photon_number(p, 9e9, kappa / 2.0, kappa / 2.0, 0.0);
        assert!(rel(n, 0.889611397418392995) < 1e-12);
        assert!(rel(photon_number(2.0 * p, 9e9, kappa / 2.0, kappa / 2.0, 0.0), 2.0 * n) < 1e-14);
        assert!(rel(photon_number(p, 9e9, kappa / 2.0, kappa / 2.0, kappa), n / 5.0) < 1e-14);
        assert!(rel(power_at_device(-80.0, 60.0), 1e-17) < 1e-12);
    }

    #[test]
    fn parameter_sets() {
        let t = TransmonParams::from_energies(461e6, 11.11e9, 39e-6 * 36e-6).unwrap();
        assert!(rel(t.c_total_f, 42.0e-15) < 2e-3);
        assert!(t.in_transmon_regime());
        assert!(TransmonParams::from_energies(461e6, 400e6, 1e-12).is_err());
        let r = ResonatorLc::new(5e-9, 50e-15, 1e5, 1e5).unwrap();
        assert!(rel(r.q_internal(), 2.0 * PI * r.f_r_hz / 1e5) < 1e-14);
        assert!(ResonatorLc::new(0.0, 50e-15, 1.0, 1.0).is_err());
    }
}
