//! End-to-end recipes for the reproducible figures and tables.
//!
//! Each target runs the full chain (simulation and/or fits on bundled
//! fixtures) and returns its results plus a check table of expected band,
//! obtained value and verdict.

use std::path::{Path, PathBuf};

use gapsense_core::circuits::{capacitance_from_charging_energy, q_from_t1, q_per_area, transmon_frequency};
use gapsense_core::fieldsolver::{thin_layer_participation, ModeSpec, ParticipationReport};
use gapsense_core::fitting::{
    fit_coherent_tls, fit_decay, fit_loss_tangent, fit_power_sweep, PowerSweepOptions, PowerSweepPoint,
};
use gapsense_core::geometry::Variant;
use gapsense_core::lossmodels::{q_coherent_tls, solve_unknown_tan_delta, CoherentTlsModel, LossBudget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::data::{write_csv, Table};
use crate::error::Result;
use crate::fixtures;
use crate::reference::{self, QubitRow, GAPS_NM, QUBITS};
use crate::report::{fit_record, Check, InputFile};
use crate::simulate::{plot_rows, run_points, thread_pool, PointResult, SweepPoint, PLOT_HEADER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    #[value(name = "fig2")]
    Fig2,
    #[value(name = "fig4b")]
    Fig4b,
    #[value(name = "fig6")]
    Fig6,
    #[value(name = "fig7")]
    Fig7,
    #[value(name = "tableI")]
    TableI,
    #[value(name = "tableII")]
    TableII,
}

impl Target {
    pub const ALL: [Target; 6] = [Self::Fig2, Self::Fig4b, Self::Fig6, Self::Fig7, Self::TableI, Self::TableII];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig4b => "fig4b",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::TableI => "tableI",
            Self::TableII => "tableII",
        }
    }
}

/// Relative noise on forward-generated Q values in the loss-tangent round trips.
pub const ROUND_TRIP_NOISE: f64 = 0.02;
/// Grid for the 5 um membrane capacitor: the 80 nm metal and 220 nm device
/// layer stay resolved while the mesh stays tractable.
pub const BIG_QUBIT_GRID_NM: f64 = 20.0;

pub struct Outcome {
    pub results: Value,
    pub checks: Vec<Check>,
    pub files: Vec<InputFile>,
}

pub struct Recipe<'a> {
    pub cfg: &'a RunConfig,
    pub pool: rayon::ThreadPool,
    pub fixtures_dir: PathBuf,
    pub out: Option<&'a Path>,
    files: Vec<InputFile>,
}

impl<'a> Recipe<'a> {
    pub fn new(cfg: &'a RunConfig, out: Option<&'a Path>) -> Result<Self> {
        Ok(Self {
            cfg,
            pool: thread_pool(cfg.run.threads)?,
            fixtures_dir: cfg.run.fixtures_dir.clone().unwrap_or_else(fixtures::default_dir),
            out,
            files: Vec::new(),
        })
    }

    pub fn run(mut self, target: Target) -> Result<Outcome> {
        let (results, checks) = match target {
            Target::Fig2 => self.fig2()?,
            Target::Fig4b => self.fig4b()?,
            Target::Fig6 => self.fig6()?,
            Target::Fig7 => self.fig7()?,
            Target::TableI => self.table_one()?,
            Target::TableII => self.table_two()?,
        };
        Ok(Outcome { results, checks, files: self.files })
    }

    fn fixture(&mut self, name: &str) -> Result<Table> {
        let path = fixtures::locate(&self.fixtures_dir, name)?;
        let t = Table::read(&path)?;
        self.files.push(InputFile { path: path.display().to_string(), sha256: t.sha256.clone() });
        Ok(t)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.cfg.run.seed);
        r.set_stream(stream);
        r
    }

    fn point(&self, variant: Variant, gap_nm: f64, mode: ModeSpec<f64>) -> SweepPoint {
        SweepPoint {
            spec: self.cfg.geometry.spec(variant, gap_nm),
            grid_spacing_nm: self.cfg.grid_spacing_nm(gap_nm),
            mode,
        }
    }

    fn qubit_mode(&self, row: &QubitRow) -> ModeSpec<f64> {
        ModeSpec {
            finger_length_m: self.cfg.mode.finger_length_um * 1e-6,
            frequency_hz: row.f_ge_hz,
            capacitance_f: Some(capacitance_from_charging_energy(row.e_c_hz)),
        }
    }

    fn solve(&self, points: &[SweepPoint]) -> Vec<PointResult> {
        let dumps = self.out.filter(|_| self.cfg.run.dump_fields);
        run_points(points, &self.cfg.layer.spec(), &self.pool, dumps)
    }

    /// Vacuum-gap capacitor over the four fabricated gaps, normalized to the
    /// matching qubit of the parameter table.
    pub fn gap_sweep(&self) -> Result<Vec<ParticipationReport<f64>>> {
        let points: Vec<SweepPoint> =
            QUBITS.iter().map(|q| self.point(Variant::VacuumGap, q.gap_nm, self.qubit_mode(q))).collect();
        let results = self.solve(&points);
        self.write_plot("gap_sweep_vacuum_gap.csv", &results, Variant::VacuumGap)?;
        results.into_iter().map(PointResult::into_result).collect()
    }

    fn write_plot(&self, name: &str, results: &[PointResult], variant: Variant) -> Result<()> {
        match self.out {
            Some(dir) => write_csv(&dir.join(name), &PLOT_HEADER, &plot_rows(results, variant)),
            None => Ok(()),
        }
    }

    fn fig2(&mut self) -> Result<(Value, Vec<Check>)> {
        let row0 = &QUBITS[0];
        let mut points: Vec<SweepPoint> =
            Variant::ALL.iter().map(|&v| self.point(v, row0.gap_nm, self.qubit_mode(row0))).collect();
        points.extend(QUBITS[1..].iter().map(|q| self.point(Variant::VacuumGap, q.gap_nm, self.qubit_mode(q))));
        let results = self.solve(&points);
        self.write_plot("gap_sweep_vacuum_gap.csv", &results, Variant::VacuumGap)?;
        if let Some(dir) = self.out {
            let rows: Vec<Vec<f64>> = results[..4]
                .iter()
                .enumerate()
                .filter_map(|(k, r)| {
                    r.report.as_ref().map(|p| vec![k as f64, p.s_ma_per_m, p.s_ms_per_m, p.s_sa_per_m, p.p_vacuum])
                })
                .collect();
            write_csv(
                &dir.join("variants_100nm.csv"),
                &["variant_index", "s_ma_per_m", "s_ms_per_m", "s_sa_per_m", "p_vacuum"],
                &rows,
            )?;
        }
        let slowest = results[..4].iter().map(|r| r.elapsed_s).fold(0.0, f64::max);
        let reports: Vec<ParticipationReport<f64>> =
            results.into_iter().map(PointResult::into_result).collect::<Result<_>>()?;
        let (a, b, c, d) = (&reports[0], &reports[1], &reports[2], &reports[3]);
        let sweep: Vec<&ParticipationReport<f64>> = std::iter::once(d).chain(&reports[4..]).collect();
        let s_ma: Vec<f64> = sweep.iter().map(|r| r.s_ma_per_m).collect();

        let mut checks = vec![
            Check::within("p_vacuum bulk substrate (a)", 0.11, 0.17, a.p_vacuum, "1"),
            Check::at_least("p_vacuum vacuum gap (d)", 0.99, d.p_vacuum, "1"),
            Check::flag(
                "p_vacuum ordering a < b < c < d",
                "strictly increasing",
                a.p_vacuum < b.p_vacuum && b.p_vacuum < c.p_vacuum && c.p_vacuum < d.p_vacuum,
            ),
            Check::new("slowest variant solve", "<= 600 s", slowest, "s", slowest <= 600.0),
            Check::at_least("s_MA / s_MS (d, 100 nm)", 100.0, d.s_ma_per_m / d.s_ms_per_m, "1"),
            Check::at_least("s_MA / s_SA (d, 100 nm)", 100.0, d.s_ma_per_m / d.s_sa_per_m, "1"),
            Check::factor("p_MA (d, 100 nm)", reference::P_MA, 2.0, d.p_ma, "1"),
            Check::factor("p_MS (d, 100 nm)", reference::P_MS, 3.0, d.p_ms, "1"),
            Check::factor("p_SA (d, 100 nm)", reference::P_SA, 3.0, d.p_sa, "1"),
            Check::factor("p_Si (d, 100 nm)", reference::P_SI, 3.0, d.p_si, "1"),
            Check::flag("s_MA(d) > s_MA(a)", "true", d.s_ma_per_m > a.s_ma_per_m),
            Check::flag("s_MS(d) < s_MS(a)", "true", d.s_ms_per_m < a.s_ms_per_m),
            Check::flag("s_SA(d) < s_SA(a)", "true", d.s_sa_per_m < a.s_sa_per_m),
            Check::flag("s_MA strictly decreasing in gap", "true", s_ma.windows(2).all(|w| w[1] < w[0])),
        ];
        checks.push(Check::within("s_SA / s_MA (a, 100 nm)", 0.1, 10.0, a.s_sa_per_m / a.s_ma_per_m, "1"));
        checks.push(Check::within("s_MS / s_MA (a, 100 nm)", 0.1, 10.0, a.s_ms_per_m / a.s_ma_per_m, "1"));
        let variants: Vec<Value> =
            Variant::ALL.iter().zip(&reports).map(|(v, r)| json!({ "variant": v, "report": r })).collect();
        let gaps: Vec<Value> = GAPS_NM.iter().zip(&sweep).map(|(g, r)| json!({ "gap_nm": g, "report": r })).collect();
        let results = json!({
            "target": "fig2",
            "variants_at_100nm": variants,
            "vacuum_gap_sweep": gaps,
            "selectivity_vacuum_gap_100nm": {
                "s_ma_over_s_ms": d.s_ma_per_m / d.s_ms_per_m,
                "s_ma_over_s_sa": d.s_ma_per_m / d.s_sa_per_m,
                "s_ma_over_s_ms_db": 10.0 * (d.s_ma_per_m / d.s_ms_per_m).log10(),
            },
        });
        Ok((results, checks))
    }

    /// Forward-generates `Q = 1 / (s eps t tan_delta)` with relative noise and
    /// fits the loss tangent back.
    pub fn loss_tangent_round_trip(&self, s_ma: &[f64], tan_delta: f64, stream: u64) -> Result<(Value, f64)> {
        let layer = self.cfg.layer.spec();
        let noise = Normal::new(0.0, ROUND_TRIP_NOISE).expect("finite sigma");
        let mut rng = self.rng(stream);
        let points: Vec<(f64, f64)> = GAPS_NM
            .iter()
            .zip(s_ma)
            .map(|(&g, &s)| (g, (1.0 + noise.sample(&mut rng)) / (thin_layer_participation(s, &layer) * tan_delta)))
            .collect();
        let sigma: Vec<f64> = points.iter().map(|p| p.1 * ROUND_TRIP_NOISE).collect();
        let fit = fit_loss_tangent(&points, s_ma, &layer, Some(&sigma))?;
        let tan = fit.result.params[0];
        let q: Vec<Value> =
            points.iter().zip(s_ma).map(|(&(g, q), &s)| json!({ "gap_nm": g, "q": q, "s_ma_per_m": s })).collect();
        let v = json!({
            "true_tan_delta": tan_delta,
            "relative_noise": ROUND_TRIP_NOISE,
            "seed": self.cfg.run.seed,
            "points": q,
            "fit": fit_record(&fit.result, "generated in memory", json!({ "layer": layer })),
            "relative_rms": fit.relative_rms,
        });
        Ok((v, tan))
    }

    fn fig4b(&mut self) -> Result<(Value, Vec<Check>)> {
        let sweep = self.gap_sweep()?;
        let s_ma: Vec<f64> = sweep.iter().map(|r| r.s_ma_per_m).collect();
        let layer = self.cfg.layer.spec();
        let (round_trip, tan) = self.loss_tangent_round_trip(&s_ma, reference::TAN_DELTA_RESONATOR, 1)?;

        let table = self.fixture(fixtures::POWER_NAME)?;
        let points: Vec<PowerSweepPoint<f64>> = (0..table.rows)
            .map(|k| {
                Ok(PowerSweepPoint {
                    n_photons: table.positive("n_photons")?[k],
                    q_internal: table.positive("q_internal")?[k],
                    q_sigma: table.optional("q_sigma").map(|s| s[k]),
                })
            })
            .collect::<Result<_>>()?;
        let opts = PowerSweepOptions::new(reference::POWER_SWEEP_FREQUENCY_HZ, reference::BATH_TEMPERATURE_K).log();
        let power = fit_power_sweep(&points, &opts)?;
        let highest = points.iter().map(|p| p.q_internal).fold(f64::MIN, f64::max);

        let predicted: Vec<Value> = GAPS_NM
            .iter()
            .zip(&s_ma)
            .zip(&reference::RESONATOR_FREQUENCIES_HZ)
            .map(|((&g, &s), &f)| {
                json!({
                    "gap_nm": g,
                    "resonance_hz": f,
                    "s_ma_per_m": s,
                    "p_ma": thin_layer_participation(s, &layer),
                    "q_low_predicted": 1.0 / (thin_layer_participation(s, &layer) * reference::TAN_DELTA_RESONATOR),
                })
            })
            .collect();
        let checks = vec![
            Check::relative("tan_delta_MA round trip (resonators)", reference::TAN_DELTA_RESONATOR, 0.05, tan, "1"),
            Check::flag("n_c = 46 inside 95% CI", "covered", power.covers("n_c", reference::POWER_SWEEP_N_C)),
            Check::flag("beta = 0.43 inside 95% CI", "covered", power.covers("beta", reference::POWER_SWEEP_BETA)),
        ];
        let results = json!({
            "target": "fig4b",
            "loss_tangent_round_trip": round_trip,
            "q_low_vs_gap": predicted,
            "power_sweep": {
                "fit": fit_record(&power, &table.sha256, json!({ "log_residuals": true, "frequency_hz": opts.frequency_hz, "temperature_k": opts.temperature_k })),
                "q_high": {
                    "fitted": { "value": power.get("q_high"), "ci95": power.ci("q_high"), "label": "fitted high-power limit of the TLS power model" },
                    "highest_measured": { "value": highest, "label": "largest measured Q in the sweep" },
                },
            },
        });
        Ok((results, checks))
    }

    fn decay_fits(&mut self) -> Result<Vec<(QubitRow, gapsense_core::fitting::DecayFit<f64>, String)>> {
        QUBITS
            .iter()
            .map(|row| {
                let t = self.fixture(&fixtures::decay_name(row))?;
                let d = fit_decay(t.column("time_s")?, t.column("population")?, None)?;
                Ok((*row, d, t.sha256.clone()))
            })
            .collect()
    }

    /// The 5 um membrane capacitor and the MS/SA loss tangent implied by its
    /// single-exponential T1 given the vacuum-gap MA loss tangent.
    pub fn big_qubit(&self) -> Result<Value> {
        let mut spec = self.cfg.geometry.spec(Variant::Membrane, reference::BIG_QUBIT_GAP_M * 1e9);
        spec.finger_width = reference::BIG_QUBIT_FINGER_M;
        let mode = ModeSpec {
            finger_length_m: self.cfg.mode.finger_length_um * 1e-6,
            frequency_hz: reference::BIG_QUBIT_FREQUENCY_HZ,
            capacitance_f: None,
        };
        let spec_padding = spec.padding_factor;
        let point = SweepPoint { spec, grid_spacing_nm: BIG_QUBIT_GRID_NM, mode };
        let r = self.solve(std::slice::from_ref(&point)).remove(0).into_result()?;
        let q = q_from_t1(reference::BIG_QUBIT_FREQUENCY_HZ, reference::BIG_QUBIT_T1_S);
        let budget = LossBudget::new().with_channel("MA", r.p_ma, reference::TAN_DELTA_QUBIT).with_channel(
            "MS+SA",
            r.p_ms + r.p_sa,
            0.0,
        );
        let tan = solve_unknown_tan_delta(q, &budget, 1)?;
        Ok(json!({
            "finger_width_m": reference::BIG_QUBIT_FINGER_M,
            "gap_m": reference::BIG_QUBIT_GAP_M,
            "grid_spacing_nm": BIG_QUBIT_GRID_NM,
            "padding_factor": spec_padding,
            "assumed_frequency_hz": reference::BIG_QUBIT_FREQUENCY_HZ,
            "t1_s": reference::BIG_QUBIT_T1_S,
            "q": q,
            "report": r,
            "tan_delta_ms_sa": tan,
        }))
    }

    fn fig6(&mut self) -> Result<(Value, Vec<Check>)> {
        let fits = self.decay_fits()?;
        let sweep = self.gap_sweep()?;
        let s_ma: Vec<f64> = sweep.iter().map(|r| r.s_ma_per_m).collect();
        let rows: Vec<Value> = fits
            .iter()
            .zip(&sweep)
            .map(|((row, d, _), rep)| {
                let (t_in, t_res) = (d.double.params[1], d.double.params[2]);
                let q_in = q_from_t1(row.f_ge_hz, t_in);
                let q_res = q_from_t1(row.f_ge_hz, t_res);
                json!({
                    "gap_nm": row.gap_nm,
                    "area_um2": row.area_m2() * 1e12,
                    "q_in": q_in,
                    "q_res": q_res,
                    "q_in_per_area_per_um2": q_per_area(q_in, row.area_m2()) * 1e-12,
                    "q_res_per_area_per_um2": q_per_area(q_res, row.area_m2()) * 1e-12,
                    "q_in_published": q_from_t1(row.f_ge_hz, row.t1_in_s),
                    "q_res_published": q_from_t1(row.f_ge_hz, row.t1_res_s),
                    "e_zpf_max_v_per_m": rep.e_zpf_max_v_per_m,
                    "degenerate": d.degenerate,
                })
            })
            .collect();
        let r0 = &QUBITS[0];
        let qa_fit = q_per_area(q_from_t1(r0.f_ge_hz, fits[0].1.double.params[1]), r0.area_m2()) * 1e-12;
        let qa_pub = q_per_area(q_from_t1(r0.f_ge_hz, r0.t1_in_s), r0.area_m2()) * 1e-12;
        let qa_pumped = q_per_area(q_from_t1(r0.f_ge_hz, reference::PUMPED_T1_S), r0.area_m2()) * 1e-12;

        let (round_trip, tan) = self.loss_tangent_round_trip(&s_ma, reference::TAN_DELTA_QUBIT, 2)?;
        // The same fit on the fixture-derived Q_in values: how far the
        // published initial decays sit from the simulated MA sensitivities.
        let layer = self.cfg.layer.spec();
        let q_in: Vec<(f64, f64)> =
            fits.iter().map(|(row, d, _)| (row.gap_nm, q_from_t1(row.f_ge_hz, d.double.params[1]))).collect();
        let measured = fit_loss_tangent(&q_in, &s_ma, &layer, None)?;
        let big = self.big_qubit()?;
        let tan_ms_sa = big["tan_delta_ms_sa"].as_f64().unwrap_or(f64::NAN);

        let checks = vec![
            Check::within("Q_in/A smallest qubit (fitted T1_in)", 16.0, 22.0, qa_fit, "um^-2"),
            Check::within("Q_in/A smallest qubit (published T1_in)", 16.0, 22.0, qa_pub, "um^-2"),
            Check::relative("Q/A under TLS pumping", reference::PUMPED_Q_PER_AREA_UM2, 0.25, qa_pumped, "um^-2")
                .non_blocking(),
            Check::relative("tan_delta_MA round trip (qubits)", reference::TAN_DELTA_QUBIT, 0.05, tan, "1"),
            Check::factor(
                "tan_delta_MS,SA (5 um membrane qubit)",
                reference::BIG_QUBIT_TAN_DELTA_MS_SA,
                10.0,
                tan_ms_sa,
                "1",
            )
            .non_blocking(),
        ];
        let records: Vec<Value> = fits
            .iter()
            .map(|(row, d, h)| json!({ "gap_nm": row.gap_nm, "fit": fit_record(&d.double, h, json!({})) }))
            .collect();
        let results = json!({
            "target": "fig6",
            "qubits": rows,
            "decay_fits": records,
            "q_per_area_smallest_qubit_per_um2": { "fitted": qa_fit, "published_t1": qa_pub, "pumped_t1": qa_pumped },
            "loss_tangent_round_trip": round_trip,
            "loss_tangent_from_fixture_q_in": {
                "fit": fit_record(&measured.result, "derived from decay fixtures", json!({ "layer": layer })),
                "relative_rms": measured.relative_rms,
                "consistent": measured.consistent,
            },
            "ms_sa_extraction": big,
        });
        Ok((results, checks))
    }

    fn fig7(&mut self) -> Result<(Value, Vec<Check>)> {
        let sweep = self.gap_sweep()?;
        let e_max: Vec<f64> = sweep.iter().map(|r| r.e_zpf_max_v_per_m).collect();
        let e_mean: Vec<f64> = sweep.iter().map(|r| r.e_zpf_mean_v_per_m).collect();
        let ratio = e_max[0] / e_max[3];
        let (q0, xi) = reference::TLS_RESONATOR;
        let m = CoherentTlsModel { q0, xi_k_m2_per_v2: xi, temperature_k: reference::BATH_TEMPERATURE_K };
        let rows: Vec<Value> = QUBITS
            .iter()
            .zip(&sweep)
            .map(|(q, r)| {
                json!({
                    "gap_nm": q.gap_nm,
                    "v_zpf_v": r.v_zpf_v,
                    "zpf_capacitance_f": r.zpf_capacitance_f,
                    "zpf_frequency_hz": r.zpf_frequency_hz,
                    "e_zpf_max_v_per_m": r.e_zpf_max_v_per_m,
                    "e_zpf_mean_v_per_m": r.e_zpf_mean_v_per_m,
                    "grid_spacing_m": r.grid.grid_spacing_m,
                    "q_coherent_resonator_row": q_coherent_tls(r.e_zpf_max_v_per_m, &m),
                })
            })
            .collect();
        let checks = vec![
            Check::flag("e_zpf max decreasing in gap", "strictly decreasing", e_max.windows(2).all(|w| w[1] < w[0])),
            Check::flag("e_zpf mean decreasing in gap", "strictly decreasing", e_mean.windows(2).all(|w| w[1] < w[0])),
            Check::within("e_zpf(100 nm) / e_zpf(1000 nm)", 3.0, 13.0, ratio, "1"),
        ];
        let results = json!({ "target": "fig7", "gaps": rows, "ratio_100_to_1000": ratio });
        Ok((results, checks))
    }

    fn table_one(&mut self) -> Result<(Value, Vec<Check>)> {
        let (q0, xi) = reference::TLS_RESONATOR;
        let m = CoherentTlsModel { q0, xi_k_m2_per_v2: xi, temperature_k: reference::BATH_TEMPERATURE_K };
        let q_peak = q_coherent_tls(reference::TLS_PEAK_FIELD_V_PER_M, &m);
        let mut checks = vec![Check::relative("Q_TLS resonator row at 22 V/m", 6.6e5, 0.05, q_peak, "1")];
        let settings = json!({ "temperature_k": reference::BATH_TEMPERATURE_K });
        let mut round_trips = Vec::new();
        let mut fits = Vec::new();
        for (qubits, (q0, xi), label) in
            [(false, reference::TLS_RESONATOR, "resonators"), (true, reference::TLS_QUBIT, "qubits")]
        {
            // Exact forward data at the zero-point fields of the four gaps.
            let m = CoherentTlsModel { q0, xi_k_m2_per_v2: xi, temperature_k: reference::BATH_TEMPERATURE_K };
            let exact: Vec<(f64, f64)> =
                reference::TLS_FIELDS_V_PER_M.iter().map(|&e| (e, q_coherent_tls(e, &m))).collect();
            let r = fit_coherent_tls(&exact, reference::BATH_TEMPERATURE_K)?;
            checks.push(Check::relative(format!("Q_TLS,0 {label} round trip"), q0, 0.05, r.params[0], "1"));
            checks.push(Check::relative(format!("xi {label} round trip"), xi, 0.05, r.params[1], "K m^2/V^2"));
            round_trips
                .push(json!({ "device": label, "fit": fit_record(&r, "generated in memory", settings.clone()) }));

            // The noisy fixture: four points do not pin xi to 5% at this
            // noise level, so these rows are reported, not gating.
            let t = self.fixture(fixtures::coherent_name(qubits))?;
            let points: Vec<(f64, f64)> =
                t.positive("e_field_v_per_m")?.iter().copied().zip(t.positive("q_internal")?.iter().copied()).collect();
            let r = fit_coherent_tls(&points, reference::BATH_TEMPERATURE_K)?;
            checks.push(
                Check::relative(format!("Q_TLS,0 {label} from fixture"), q0, 0.05, r.params[0], "1").non_blocking(),
            );
            checks.push(
                Check::relative(format!("xi {label} from fixture"), xi, 0.05, r.params[1], "K m^2/V^2").non_blocking(),
            );
            fits.push(json!({ "device": label, "fit": fit_record(&r, &t.sha256, settings.clone()) }));
        }
        let results = json!({
            "target": "tableI",
            "q_coherent_resonator_at_22_v_per_m": q_peak,
            "round_trips": round_trips,
            "fixture_fits": fits,
            "loss_tangents": { "resonators": reference::TAN_DELTA_RESONATOR, "qubits": reference::TAN_DELTA_QUBIT },
        });
        Ok((results, checks))
    }

    fn table_two(&mut self) -> Result<(Value, Vec<Check>)> {
        let mut checks = Vec::new();
        let mut rows = Vec::new();
        for q in &QUBITS {
            let f = transmon_frequency(q.e_c_hz, q.e_j_hz);
            checks.push(Check::within(format!("f_ge {} nm", q.gap_nm), q.f_ge_hz - 20e6, q.f_ge_hz + 20e6, f, "Hz"));
            let q_in = q_from_t1(q.f_ge_hz, q.t1_in_s);
            rows.push(json!({
                "gap_nm": q.gap_nm,
                "f_ge_computed_hz": f,
                "f_ge_published_hz": q.f_ge_hz,
                "c_total_f": capacitance_from_charging_energy(q.e_c_hz),
                "ej_over_ec": q.e_j_hz / q.e_c_hz,
                "q_in": q_in,
                "q_res": q_from_t1(q.f_ge_hz, q.t1_res_s),
                "q_in_per_area_per_um2": q_per_area(q_in, q.area_m2()) * 1e-12,
            }));
        }
        let fits = self.decay_fits()?;
        let mut records = Vec::new();
        for (row, d, hash) in &fits {
            let truth = [("n_in", row.n_in), ("t1_in_s", row.t1_in_s), ("t1_res_s", row.t1_res_s)];
            let covered = truth.iter().all(|&(n, v)| d.double.covers(n, v));
            checks.push(Check::flag(
                format!("decay {} nm recovered within 95% CI", row.gap_nm),
                "all covered",
                covered,
            ));
            let near_single = row.t1_res_s / row.t1_in_s < 1.0 + gapsense_core::fitting::DEGENERACY_THRESHOLD;
            checks.push(Check::flag(
                format!("decay {} nm degenerate flag", row.gap_nm),
                if near_single { "degenerate" } else { "distinct" },
                d.degenerate == near_single,
            ));
            records.push(json!({
                "gap_nm": row.gap_nm,
                "truth": { "n_in": row.n_in, "t1_in_s": row.t1_in_s, "t1_res_s": row.t1_res_s },
                "double": fit_record(&d.double, hash, json!({})),
                "single": fit_record(&d.single, hash, json!({})),
                "degenerate": d.degenerate,
                "residual_ratio": d.residual_ratio,
            }));
        }
        let results = json!({ "target": "tableII", "qubits": rows, "decay_fits": records });
        Ok((results, checks))
    }
}
