//! Fixed config and seed give byte-identical results sections across runs
//! and thread counts.

use gapsense::config::RunConfig;
use gapsense::{cmd_fit, cmd_simulate, FitKind};

fn sweep_config(threads: usize) -> RunConfig {
    let mut cfg = RunConfig::parse(
        "[run]\nseed = 11\ngrid_spacing_nm = 25\n[sweep]\nvariants = [\"vacuum_gap\", \"membrane\"]\ngaps_nm = [500, 1000]\n",
    )
    .unwrap();
    cfg.run.threads = threads;
    cfg.mode.frequency_hz = vec![5.4e9];
    cfg.mode.e_c_hz = vec![];
    cfg
}

#[test]
fn simulate_results_do_not_depend_on_threads() {
    let one = cmd_simulate(&sweep_config(1), None).unwrap();
    let again = cmd_simulate(&sweep_config(1), None).unwrap();
    let four = cmd_simulate(&sweep_config(4), None).unwrap();
    assert_eq!(one.results_json(), again.results_json());
    assert_eq!(one.results_json(), four.results_json());
    assert_eq!(one.exit_code(), 0);
}

#[test]
fn fit_results_are_reproducible() {
    let dir = gapsense::fixtures::default_dir();
    for (kind, file) in
        [(FitKind::Power, "power_500nm.csv"), (FitKind::Decay, "decay_200nm.csv"), (FitKind::S11, "s11_500nm.csv")]
    {
        let text = format!(
            "[run]\nseed = 3\n[fit]\ninput = {:?}\nfrequency_hz = 9.8e9\n",
            dir.join(file).display().to_string()
        );
        let runs: Vec<String> = [1, 3]
            .iter()
            .map(|&t| {
                let mut cfg = RunConfig::parse(&text).unwrap();
                cfg.run.threads = t;
                cmd_fit(&cfg, kind, None).unwrap().results_json()
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{}", kind.name());
    }
}
