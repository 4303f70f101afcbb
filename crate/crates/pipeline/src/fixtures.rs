//! Synthetic measurement data generated from published parameters.
//!
//! Raw traces are not available, so every bundled fixture is produced here
//! from a fixed seed and records its generating parameters in `#` header
//! lines. `cargo run -p gapsense --example make_fixtures` rewrites them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gapsense_core::fitting::{s11_model, S11Params};
use gapsense_core::lossmodels::{
    decay_population, q_coherent_tls, q_total, CoherentTlsModel, DoubleExpModel, TlsPowerModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{PipelineError, Result};
use crate::reference::{self, QubitRow};

pub const FIXTURE_SEED: u64 = 2022;

/// Decay noise: absolute population standard deviation.
pub const DECAY_NOISE: f64 = 0.01;
pub const DECAY_POINTS: usize = 80;
/// Power sweep noise: relative Q standard deviation.
pub const POWER_NOISE: f64 = 0.05;
/// Coherent-TLS noise: relative Q standard deviation.
pub const COHERENT_NOISE: f64 = 0.005;

pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Reads a bundled fixture, reporting a missing file by name.
pub fn locate(dir: &Path, name: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(PipelineError::MissingFixture(format!("{name} (looked in {})", dir.display())))
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn header(out: &mut String, model: &str, seed: u64, params: &[(&str, f64)]) {
    let _ = writeln!(out, "# synthetic data; regenerate with `cargo run -p gapsense --example make_fixtures`");
    let _ = writeln!(out, "# model = {model}");
    let _ = writeln!(out, "# seed = {seed}");
    for (k, v) in params {
        let _ = writeln!(out, "# {k} = {v:e}");
    }
}

pub fn decay_name(row: &QubitRow) -> String {
    format!("decay_{}nm.csv", row.gap_nm)
}

/// Population decay of one qubit sampled over three residual time constants.
pub fn decay_csv(row: &QubitRow, seed: u64) -> String {
    let m = DoubleExpModel { n_in: row.n_in, t1_in_s: row.t1_in_s, t1_res_s: row.t1_res_s };
    let t_max = 3.0 * row.t1_res_s;
    let noise = Normal::new(0.0, DECAY_NOISE).expect("finite sigma");
    let mut r = rng(seed);
    let mut out = String::new();
    header(
        &mut out,
        "double_exponential",
        seed,
        &[
            ("gap_nm", row.gap_nm),
            ("n_in", row.n_in),
            ("t1_in_s", row.t1_in_s),
            ("t1_res_s", row.t1_res_s),
            ("f_ge_hz", row.f_ge_hz),
            ("population_sigma", DECAY_NOISE),
        ],
    );
    out.push_str("time_s,population\n");
    for k in 0..DECAY_POINTS {
        let t = t_max * k as f64 / (DECAY_POINTS - 1) as f64;
        let p = decay_population(t, &m) + noise.sample(&mut r);
        let _ = writeln!(out, "{t:.6e},{p:.6e}");
    }
    out
}

pub fn power_model() -> TlsPowerModel<f64> {
    TlsPowerModel {
        q_low: reference::POWER_SWEEP_Q_LOW,
        q_high: reference::POWER_SWEEP_Q_HIGH,
        n_c: reference::POWER_SWEEP_N_C,
        beta: reference::POWER_SWEEP_BETA,
        frequency_hz: reference::POWER_SWEEP_FREQUENCY_HZ,
        temperature_k: reference::BATH_TEMPERATURE_K,
    }
}

/// Q(n) of the 500 nm resonator over eight decades of photon number with
/// relative noise and per-point uncertainties.
pub fn power_csv(seed: u64, points: usize) -> String {
    let m = power_model();
    let noise = Normal::new(0.0, POWER_NOISE).expect("finite sigma");
    let mut r = rng(seed);
    let mut out = String::new();
    header(
        &mut out,
        "tls_power",
        seed,
        &[
            ("q_low", m.q_low),
            ("q_high", m.q_high),
            ("n_c", m.n_c),
            ("beta", m.beta),
            ("frequency_hz", m.frequency_hz),
            ("temperature_k", m.temperature_k),
            ("relative_sigma", POWER_NOISE),
        ],
    );
    out.push_str("n_photons,q_internal,q_sigma\n");
    for k in 0..points {
        let n = 10f64.powf(-2.0 + 8.0 * k as f64 / (points - 1) as f64);
        let q = q_total(n, &m);
        let _ = writeln!(out, "{n:.6e},{:.6e},{:.6e}", q * (1.0 + noise.sample(&mut r)), q * POWER_NOISE);
    }
    out
}

pub fn s11_params() -> S11Params<f64> {
    S11Params { f0_hz: 9.8e9, q_int: 1e5, q_ext: 1.9e4, amplitude: 0.8, phase_rad: 0.4, delay_s: 1e-9 }
}

pub const S11_NOISE: f64 = 0.005;

/// Reflection trace spanning about twelve linewidths.
pub fn s11_csv(seed: u64) -> String {
    let p = s11_params();
    let kappa = p.f0_hz * (1.0 / p.q_int + 1.0 / p.q_ext);
    let noise = Normal::new(0.0, S11_NOISE).expect("finite sigma");
    let mut r = rng(seed);
    let mut out = String::new();
    header(
        &mut out,
        "s11_reflection",
        seed,
        &[
            ("f0_hz", p.f0_hz),
            ("q_int", p.q_int),
            ("q_ext", p.q_ext),
            ("amplitude", p.amplitude),
            ("phase_rad", p.phase_rad),
            ("delay_s", p.delay_s),
            ("quadrature_sigma", S11_NOISE),
        ],
    );
    out.push_str("freq_hz,s11_re,s11_im\n");
    let n = 401;
    for k in 0..n {
        let f = p.f0_hz + kappa * (-6.0 + 12.0 * k as f64 / (n - 1) as f64);
        let z = s11_model(f, &p);
        let _ = writeln!(out, "{f:.9e},{:.6e},{:.6e}", z.re + noise.sample(&mut r), z.im + noise.sample(&mut r));
    }
    out
}

pub fn coherent_name(qubits: bool) -> &'static str {
    if qubits {
        "coherent_qubits.csv"
    } else {
        "coherent_resonators.csv"
    }
}

/// Q against zero-point gap field for one row of the TLS parameter table.
pub fn coherent_csv(qubits: bool, seed: u64) -> String {
    let (q0, xi) = if qubits { reference::TLS_QUBIT } else { reference::TLS_RESONATOR };
    let m = CoherentTlsModel { q0, xi_k_m2_per_v2: xi, temperature_k: reference::BATH_TEMPERATURE_K };
    let noise = Normal::new(0.0, COHERENT_NOISE).expect("finite sigma");
    let mut r = rng(seed);
    let mut out = String::new();
    header(
        &mut out,
        "coherent_tls",
        seed,
        &[("q0", q0), ("xi_k_m2_per_v2", xi), ("temperature_k", m.temperature_k), ("relative_sigma", COHERENT_NOISE)],
    );
    out.push_str("e_field_v_per_m,q_internal\n");
    for &e in &reference::TLS_FIELDS_V_PER_M {
        let q = q_coherent_tls(e, &m) * (1.0 + noise.sample(&mut r));
        let _ = writeln!(out, "{e:.6e},{q:.6e}");
    }
    out
}

pub const POWER_NAME: &str = "power_500nm.csv";
pub const S11_NAME: &str = "s11_500nm.csv";

/// Every bundled fixture as `(file name, contents)`.
pub fn all() -> Vec<(String, String)> {
    let mut v = Vec::new();
    for (k, row) in reference::QUBITS.iter().enumerate() {
        v.push((decay_name(row), decay_csv(row, FIXTURE_SEED + k as u64)));
    }
    v.push((POWER_NAME.into(), power_csv(FIXTURE_SEED + 10, 25)));
    v.push((S11_NAME.into(), s11_csv(FIXTURE_SEED + 20)));
    v.push((coherent_name(false).into(), coherent_csv(false, FIXTURE_SEED + 30)));
    v.push((coherent_name(true).into(), coherent_csv(true, FIXTURE_SEED + 31)));
    v
}

pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    all()
        .into_iter()
        .map(|(name, text)| {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| PipelineError::io(&p, e))?;
            Ok(p)
        })
        .collect()
}
