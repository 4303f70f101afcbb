//! Power sweeps given as source power in dBm plus a line calibration.

use std::path::Path;

use gapsense::config::{Calibration, FitSection};
use gapsense::data::Table;
use gapsense::fit::power;
use gapsense::fixtures;
use gapsense_core::circuits::{photon_number, power_at_device};

fn section(input: &Path, calibration: Option<Calibration>) -> FitSection {
    FitSection {
        input: input.to_path_buf(),
        frequency_hz: Some(9.8e9),
        temperature_k: 0.01,
        log_residuals: true,
        require_distinct: false,
        area_um2: None,
        calibration,
        expect: Default::default(),
    }
}

fn calibration() -> Calibration {
    Calibration {
        attenuation_db: 80.0,
        frequency_hz: 9.8e9,
        kappa_int_rad_s: 2.0 * std::f64::consts::PI * 9.8e4,
        kappa_ext_rad_s: 2.0 * std::f64::consts::PI * 5.2e5,
        detuning_rad_s: 0.0,
    }
}

/// The photon-number fixture rewritten as source power.
fn dbm_csv(photons: &Table, cal: &Calibration) -> String {
    let per_watt = photon_number(
        power_at_device(30.0, cal.attenuation_db) / power_at_device(30.0, 0.0),
        cal.frequency_hz,
        cal.kappa_int_rad_s,
        cal.kappa_ext_rad_s,
        0.0,
    );
    let n = photons.column("n_photons").unwrap();
    let q = photons.column("q_internal").unwrap();
    let s = photons.column("q_sigma").unwrap();
    let mut out = String::from("power_dbm,q_internal,q_sigma\n");
    for k in 0..n.len() {
        let dbm = 10.0 * (n[k] / per_watt).log10() + 30.0;
        out.push_str(&format!("{dbm:.12e},{:.12e},{:.12e}\n", q[k], s[k]));
    }
    out
}

#[test]
fn dbm_input_matches_photon_input() {
    let path = fixtures::default_dir().join(fixtures::POWER_NAME);
    let photons = Table::read(&path).unwrap();
    let direct = power(&section(&path, None), &photons).unwrap();

    let cal = calibration();
    let tmp = tempfile::tempdir().unwrap();
    let dbm_path = tmp.path().join("dbm.csv");
    std::fs::write(&dbm_path, dbm_csv(&photons, &cal)).unwrap();
    let table = Table::read(&dbm_path).unwrap();
    let via_dbm = power(&section(&dbm_path, Some(cal)), &table).unwrap();

    for (a, b) in direct.primary.params.iter().zip(&via_dbm.primary.params) {
        assert!(((a - b) / a).abs() < 1e-6, "{a} vs {b}");
    }
    assert!(via_dbm.results.to_string().contains("power_dbm+calibration"));
}

#[test]
fn dbm_without_calibration_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("dbm.csv");
    std::fs::write(&p, "power_dbm,q_internal\n-20,1e5\n-10,2e5\n").unwrap();
    let t = Table::read(&p).unwrap();
    let e = power(&section(&p, None), &t).err().unwrap();
    assert_eq!(e.exit_code(), gapsense::EXIT_INPUT);
    assert!(e.to_string().contains("calibration"), "{e}");
}

#[test]
fn missing_photon_source_names_the_column() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("q.csv");
    std::fs::write(&p, "q_internal\n1e5\n").unwrap();
    let t = Table::read(&p).unwrap();
    let e = power(&section(&p, None), &t).err().unwrap();
    assert!(e.to_string().contains("n_photons"), "{e}");
}

#[test]
fn both_q_high_readings_are_reported() {
    let path = fixtures::default_dir().join(fixtures::POWER_NAME);
    let out = power(&section(&path, None), &Table::read(&path).unwrap()).unwrap();
    let q = &out.results["q_high"];
    assert!(q["fitted"]["value"].as_f64().unwrap() > 0.0);
    assert!(q["highest_measured"]["value"].as_f64().unwrap() > 0.0);
    assert_ne!(q["fitted"]["label"], q["highest_measured"]["label"]);
}
