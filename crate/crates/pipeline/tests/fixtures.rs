//! The bundled fixtures are exactly what the generator produces.

use gapsense::data::Table;
use gapsense::fixtures;

#[test]
fn bundled_fixtures_match_the_generator() {
    let dir = fixtures::default_dir();
    for (name, text) in fixtures::all() {
        let on_disk = std::fs::read_to_string(dir.join(&name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, text, "{name} is stale; rerun the make_fixtures example");
    }
}

#[test]
fn fixtures_parse_with_their_schemas() {
    let dir = fixtures::default_dir();
    let schemas: [(&str, &[&str]); 4] = [
        ("decay_100nm.csv", &["time_s", "population"]),
        (fixtures::POWER_NAME, &["n_photons", "q_internal", "q_sigma"]),
        (fixtures::S11_NAME, &["freq_hz", "s11_re", "s11_im"]),
        ("coherent_qubits.csv", &["e_field_v_per_m", "q_internal"]),
    ];
    for (name, cols) in schemas {
        let t = Table::read(&dir.join(name)).unwrap();
        for c in cols {
            assert!(t.has(c), "{name} lacks {c}");
        }
        assert!(t.rows >= 4);
    }
}

#[test]
fn generation_is_seed_deterministic() {
    assert_eq!(fixtures::all(), fixtures::all());
    assert_ne!(fixtures::power_csv(1, 25), fixtures::power_csv(2, 25));
}
