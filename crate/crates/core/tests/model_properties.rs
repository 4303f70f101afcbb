use gapsense_core::circuits::*;
use gapsense_core::lossmodels::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn power_model() -> impl Strategy<Value = TlsPowerModel<f64>> {
    (1e3f64..1e6, 1.0f64..100.0, 0.1f64..1e4, 0.1f64..1.0, 1e9f64..1e10, 0.0f64..0.2).prop_map(
        |(q_low, ratio, n_c, beta, frequency_hz, temperature_k)| TlsPowerModel {
            q_low,
            q_high: q_low * ratio,
            n_c,
            beta,
            frequency_hz,
            temperature_k,
        },
    )
}

fn budget() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1e-3), 1..6)
}

fn build(channels: &[(f64, f64)]) -> LossBudget<f64> {
    channels.iter().enumerate().fold(LossBudget::new(), |b, (k, &(p, t))| b.with_channel(format!("c{k}"), p, t))
}

fn inverse(q: QualityFactor<f64>) -> f64 {
    q.value().map_or(0.0, |v| 1.0 / v)
}

proptest! {
    #[test]
    fn power_q_is_monotone_and_capped(m in power_model(), a in 0.0f64..1e6, b in 0.0f64..1e6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (q_lo, q_hi) = (q_total(lo, &m), q_total(hi, &m));
        prop_assert!(q_hi >= q_lo * (1.0 - 1e-14));
        prop_assert!(q_hi <= m.q_high * (1.0 + 1e-12));
        prop_assert!(q_lo > 0.0);
    }

    #[test]
    fn decay_is_monotone_and_bounded(n_in in 0.0f64..5.0, t_in in 1e-8f64..1e-5, ratio in 1.0f64..20.0,
                                    a in 0.0f64..1e-4, b in 0.0f64..1e-4) {
        let m = DoubleExpModel { n_in, t1_in_s: t_in, t1_res_s: t_in * ratio };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (p_lo, p_hi) = (decay_population(lo, &m), decay_population(hi, &m));
        prop_assert!(p_hi <= p_lo);
        prop_assert!(p_lo <= 1.0);
        prop_assert!(p_hi > 0.0 || hi > 100.0 * m.t1_res_s);
    }

    #[test]
    fn decay_tail_slope_is_residual_rate(n_in in 0.0f64..5.0, t_in in 1e-7f64..1e-5, ratio in 1.5f64..20.0) {
        let m = DoubleExpModel { n_in, t1_in_s: t_in, t1_res_s: t_in * ratio };
        // Far enough into the tail that the fast term has died out, close
        // enough that the population is still well above underflow.
        let t = 20.0 * t_in + 2.0 * m.t1_res_s;
        let dt = 0.01 * m.t1_res_s;
        let slope = (decay_population(t + dt, &m).ln() - decay_population(t, &m).ln()) / dt;
        prop_assert!(rel(slope, -1.0 / m.t1_res_s) < 0.01);
    }

    #[test]
    fn coherent_q_is_monotone_and_floored(q0 in 1e3f64..1e6, xi in 0.0f64..1e-2, t in 1e-3f64..0.1,
                                          a in 0.0f64..100.0, b in 0.0f64..100.0) {
        let m = CoherentTlsModel { q0, xi_k_m2_per_v2: xi, temperature_k: t };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(q_coherent_tls(hi, &m) >= q_coherent_tls(lo, &m));
        prop_assert!(q_coherent_tls(lo, &m) >= q0);
    }

    #[test]
    fn budget_is_permutation_invariant(channels in budget(), seed in any::<u64>()) {
        let mut shuffled = channels.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = inverse(q_tls_budget(&build(&channels)).unwrap());
        let b = inverse(q_tls_budget(&build(&shuffled)).unwrap());
        prop_assert!((a - b).abs() <= 1e-15 * a.max(1e-300));
    }

    #[test]
    fn budget_is_additive_in_inverse_q(left in budget(), right in budget()) {
        let joined: Vec<_> = left.iter().chain(&right).copied().collect();
        let a = inverse(q_tls_budget(&build(&left)).unwrap());
        let b = inverse(q_tls_budget(&build(&right)).unwrap());
        let ab = inverse(q_tls_budget(&build(&joined)).unwrap());
        prop_assert!((ab - (a + b)).abs() <= 1e-14 * ab.max(1e-300));
    }

    #[test]
    fn charging_energy_round_trip(c in 1e-16f64..1e-11) {
        prop_assert!(rel(capacitance_from_charging_energy(charging_energy(c)), c) < 1e-12);
    }

    #[test]
    fn lc_frequency_round_trip(l in 1e-10f64..1e-7, f in 1e8f64..3e10) {
        let c = capacitance_for_frequency(l, f);
        prop_assert!(rel(lc_frequency(l, c), f) < 1e-12);
    }

    #[test]
    fn si_scaling_laws(c in 1e-15f64..1e-12, l in 1e-9f64..1e-8, k in 0.1f64..10.0, t1 in 1e-7f64..1e-4,
                       area in 1e-10f64..1e-7) {
        // E_C ~ 1/C, f_LC ~ 1/sqrt(LC), Q ~ f T1, Q/A ~ 1/A.
        prop_assert!(rel(charging_energy(c * k), charging_energy(c) / k) < 1e-12);
        prop_assert!(rel(lc_frequency(l * k, c * k), lc_frequency(l, c) / k) < 1e-12);
        prop_assert!(rel(q_from_t1(5e9 * k, t1), q_from_t1(5e9, t1) * k) < 1e-12);
        prop_assert!(rel(q_per_area(1e5, area * k), q_per_area(1e5, area) / k) < 1e-12);
    }

    #[test]
    fn photon_number_is_linear_in_power(p in 1e-20f64..1e-12, k in 0.1f64..10.0, d in 0.0f64..1e7) {
        let n = |p| photon_number(p, 9e9, 2.0e6, 1.8e6, d);
        prop_assert!(rel(n(p * k), n(p) * k) < 1e-12);
        prop_assert!(n(p) <= photon_number(p, 9e9, 2.0e6, 1.8e6, 0.0) * (1.0 + 1e-12));
    }

    #[test]
    fn transmon_frequency_is_below_plasma_frequency(e_c in 1e8f64..1e9, ratio in 20.0f64..200.0) {
        let e_j = e_c * ratio;
        let f = transmon_frequency(e_c, e_j);
        prop_assert!(f < (8.0 * e_j * e_c).sqrt());
        prop_assert!(f > 0.0);
    }
}

#[test]
fn table_two_frequencies_within_twenty_megahertz() {
    let rows: [(f64, f64, f64); 4] =
        [(461e6, 11.11e9, 5.94e9), (389e6, 10.51e9, 5.33e9), (362e6, 11.51e9, 5.41e9), (342e6, 10.28e9, 4.96e9)];
    for (e_c, e_j, f_ge) in rows {
        assert!((transmon_frequency(e_c, e_j) - f_ge).abs() < 20e6, "{e_c} {e_j}");
    }
}
