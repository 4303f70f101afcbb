//! Whole-geometry solver checks on the four cross-section variants.

use gapsense_core::fieldsolver::*;
use gapsense_core::geometry::*;

const EPS0: f64 = 8.8541878128e-12;

struct Run {
    bulk: BulkParticipation<f64>,
    s: SurfaceSensitivity<f64>,
    c_per_m: f64,
    e_mean: f64,
}

fn run_spec(spec: &GeometrySpec<f64>, h_nm: f64) -> Run {
    let map = build_cross_section(spec, h_nm * 1e-9).unwrap();
    let sol = solve_potential(&map, 1.0, DEFAULT_TOLERANCE).unwrap();
    let ifaces = extract_interfaces(&map);
    Run {
        bulk: participation(&sol, &map),
        s: surface_sensitivity(&sol, &ifaces),
        c_per_m: capacitance(&sol),
        e_mean: sol.mean_gap_field(),
    }
}

fn run(variant: Variant, gap_nm: f64, h_nm: f64) -> Run {
    run_spec(&GeometrySpec::new(variant, 1e-6, gap_nm * 1e-9), h_nm)
}

#[test]
fn refinement_moves_vacuum_participation_and_capacitance_little() {
    for v in Variant::ALL {
        let (a, b) = (run(v, 100.0, 10.0), run(v, 100.0, 5.0));
        let dp = (a.bulk.vacuum - b.bulk.vacuum).abs();
        let dc = ((a.c_per_m - b.c_per_m) / b.c_per_m).abs();
        assert!(dp < 0.005, "{v:?}: p_vacuum moved {dp}");
        assert!(dc < 0.02, "{v:?}: C/L moved {dc}");
    }
}

#[test]
fn variants_order_as_in_the_sensitivity_comparison() {
    let runs: Vec<Run> = Variant::ALL.iter().map(|&v| run(v, 100.0, 10.0)).collect();
    for w in runs.windows(2) {
        assert!(w[0].bulk.vacuum < w[1].bulk.vacuum, "{} !< {}", w[0].bulk.vacuum, w[1].bulk.vacuum);
    }
    let (a, d) = (&runs[0], &runs[3]);
    assert!(d.s.ma > a.s.ma);
    assert!(d.s.ms < a.s.ms);
    assert!(d.s.sa < a.s.sa);
}

#[test]
fn bulk_substrate_sensitivities_are_comparable() {
    let r = run(Variant::BulkSubstrate, 100.0, 10.0);
    assert!(r.s.ms > r.s.ma / 10.0 && r.s.ms < r.s.ma * 10.0, "{:?}", r.s);
    assert!(r.s.sa > r.s.ma / 10.0 && r.s.sa < r.s.ma * 10.0, "{:?}", r.s);
}

#[test]
fn vacuum_gap_metal_air_sensitivity_falls_with_gap() {
    let s: Vec<f64> = [(100.0, 5.0), (200.0, 10.0), (500.0, 10.0), (1000.0, 10.0)]
        .iter()
        .map(|&(g, h)| run(Variant::VacuumGap, g, h).s.ma)
        .collect();
    for w in s.windows(2) {
        assert!(w[1] < w[0], "{s:?}");
    }
}

#[test]
fn vacuum_gap_capacitance_exceeds_facing_plates() {
    let spec = GeometrySpec::new(Variant::VacuumGap, 1e-6, 100e-9);
    let r = run_spec(&spec, 5.0);
    let facing = spec.membrane_thickness + spec.metal_thickness;
    let gaps = (2 * spec.n_finger_pairs - 1) as f64;
    let plates = EPS0 * facing / spec.gap_width * gaps;
    assert!(r.c_per_m > plates, "{:e} vs {:e}", r.c_per_m, plates);
}

#[test]
fn gap_field_is_near_uniform_estimate_and_converged() {
    // The pointwise maximum sits on metal corners and grows without bound
    // under refinement; the gap-averaged field is the converged quantity.
    let coarse = run(Variant::VacuumGap, 100.0, 10.0);
    let fine = run(Variant::VacuumGap, 100.0, 2.5);
    let uniform = 1.0 / 100e-9;
    assert!((coarse.e_mean / uniform - 1.0).abs() < 0.2, "{:e}", coarse.e_mean);
    assert!((coarse.e_mean / fine.e_mean - 1.0).abs() < 0.2, "{:e} vs {:e}", coarse.e_mean, fine.e_mean);
}

#[test]
fn doubling_padding_leaves_capacitance_within_one_percent() {
    for v in [Variant::BulkSubstrate, Variant::VacuumGap] {
        let mut spec = GeometrySpec::new(v, 1e-6, 100e-9);
        spec.padding_factor = 3.0;
        let a = run_spec(&spec, 10.0);
        spec.padding_factor = 6.0;
        let b = run_spec(&spec, 10.0);
        assert!(((a.c_per_m - b.c_per_m) / b.c_per_m).abs() < 0.01, "{v:?}");
    }
}
