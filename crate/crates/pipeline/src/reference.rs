//! Published device parameters used by the reproduction targets and fixtures.

/// One measured transmon. `n_in` is not tabulated per device; the values
/// interpolate the quoted 0.5 to 2.5 range across the gap sweep.
#[derive(Clone, Copy, Debug)]
pub struct QubitRow {
    pub gap_nm: f64,
    pub area_um: (f64, f64),
    pub f_ge_hz: f64,
    pub e_c_hz: f64,
    pub e_j_hz: f64,
    pub t1_in_s: f64,
    pub t1_res_s: f64,
    pub n_in: f64,
}

impl QubitRow {
    pub fn area_m2(&self) -> f64 {
        self.area_um.0 * self.area_um.1 * 1e-12
    }
}

pub const QUBITS: [QubitRow; 4] = [
    QubitRow {
        gap_nm: 100.0,
        area_um: (39.0, 36.0),
        f_ge_hz: 5.94e9,
        e_c_hz: 461e6,
        e_j_hz: 11.11e9,
        t1_in_s: 0.71e-6,
        t1_res_s: 7.23e-6,
        n_in: 0.5,
    },
    QubitRow {
        gap_nm: 200.0,
        area_um: (39.0, 62.0),
        f_ge_hz: 5.33e9,
        e_c_hz: 389e6,
        e_j_hz: 10.51e9,
        t1_in_s: 0.9e-6,
        t1_res_s: 5.14e-6,
        n_in: 1.0,
    },
    QubitRow {
        gap_nm: 500.0,
        area_um: (39.0, 125.0),
        f_ge_hz: 5.41e9,
        e_c_hz: 362e6,
        e_j_hz: 11.51e9,
        t1_in_s: 1.57e-6,
        t1_res_s: 3.75e-6,
        n_in: 1.5,
    },
    QubitRow {
        gap_nm: 1000.0,
        area_um: (39.0, 239.0),
        f_ge_hz: 4.96e9,
        e_c_hz: 342e6,
        e_j_hz: 10.28e9,
        t1_in_s: 3.07e-6,
        t1_res_s: 3.22e-6,
        n_in: 2.5,
    },
];

pub const GAPS_NM: [f64; 4] = [100.0, 200.0, 500.0, 1000.0];

/// Lumped resonator resonance frequencies per gap.
pub const RESONATOR_FREQUENCIES_HZ: [f64; 4] = [9.1e9, 9.5e9, 9.8e9, 8.6e9];

pub const BATH_TEMPERATURE_K: f64 = 0.01;

/// Surface loss tangents extracted from the low-power resonator and the
/// initial-decay qubit Q values.
pub const TAN_DELTA_RESONATOR: f64 = 2.74e-4;
pub const TAN_DELTA_QUBIT: f64 = 1.47e-4;

/// Coherent-TLS field-law parameters `(q0, xi in K m^2/V^2)`.
pub const TLS_RESONATOR: (f64, f64) = (5.5e4, 3e-3);
pub const TLS_QUBIT: (f64, f64) = (8e4, 0.3e-3);
/// Highest gap field quoted for the coherent-TLS comparison, V/m.
pub const TLS_PEAK_FIELD_V_PER_M: f64 = 22.0;
/// Gap fields spanning the quoted 4 to 22 V/m range.
pub const TLS_FIELDS_V_PER_M: [f64; 4] = [22.0, 13.0, 7.0, 4.0];

/// Power sweep of the 500 nm resonator. Only `n_c` and `beta` are published;
/// the Q limits are representative.
pub const POWER_SWEEP_N_C: f64 = 46.0;
pub const POWER_SWEEP_BETA: f64 = 0.43;
pub const POWER_SWEEP_Q_LOW: f64 = 1e5;
pub const POWER_SWEEP_Q_HIGH: f64 = 5e5;
pub const POWER_SWEEP_FREQUENCY_HZ: f64 = 9.8e9;

/// Large-capacitor membrane qubit used to bound the MS and SA loss tangents.
pub const BIG_QUBIT_FINGER_M: f64 = 5e-6;
pub const BIG_QUBIT_GAP_M: f64 = 5e-6;
pub const BIG_QUBIT_T1_S: f64 = 2.41e-6;
/// Not published; taken from the quoted qubit band.
pub const BIG_QUBIT_FREQUENCY_HZ: f64 = 5.4e9;
pub const BIG_QUBIT_TAN_DELTA_MS_SA: f64 = 3.0e-4;

/// Best initial T1 of the smallest qubit under TLS pumping and its quoted Q/A.
pub const PUMPED_T1_S: f64 = 1.23e-6;
pub const PUMPED_Q_PER_AREA_UM2: f64 = 40.0;

/// Quoted Q/A of the smallest qubit from its initial decay.
pub const Q_PER_AREA_UM2: f64 = 19.0;

/// Quoted thin-layer participations of the vacuum-gap capacitor at 100 nm.
pub const P_MA: f64 = 0.03;
pub const P_MS: f64 = 1.2e-4;
pub const P_SA: f64 = 7.5e-4;
pub const P_SI: f64 = 0.004;
