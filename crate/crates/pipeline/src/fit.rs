//! Fit drivers: CSV in, fit results with provenance and residual data out.

use std::collections::BTreeMap;

use gapsense_core::circuits::{photon_number, power_at_device, q_from_t1, q_per_area};
use gapsense_core::fieldsolver::ModeSpec;
use gapsense_core::fitting::{
    fit_coherent_tls, fit_decay, fit_loss_tangent, fit_power_sweep, fit_s11, s11_model, FitResult, PowerSweepOptions,
    PowerSweepPoint, ResonanceTrace, S11Params,
};
use gapsense_core::geometry::Variant;
use gapsense_core::lossmodels::{
    decay_population, q_coherent_tls, q_total, CoherentTlsModel, DoubleExpModel, TlsPowerModel,
};
use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{FitSection, RunConfig};
use crate::data::Table;
use crate::error::{PipelineError, Result};
use crate::report::{fit_record, Check};
use crate::simulate::{run_points, thread_pool, SweepPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    S11,
    Power,
    Decay,
    Losstangent,
    Coherent,
}

impl FitKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::S11 => "s11",
            Self::Power => "power",
            Self::Decay => "decay",
            Self::Losstangent => "losstangent",
            Self::Coherent => "coherent",
        }
    }
}

/// What a fit driver hands back to the report builder.
pub struct FitOutput {
    pub results: Value,
    /// The result the `[fit.expect]` bands refer to.
    pub primary: FitResult<f64>,
    pub checks: Vec<Check>,
}

pub fn run_fit(cfg: &RunConfig, kind: FitKind, table: &Table) -> Result<FitOutput> {
    let fit = cfg.fit.as_ref().ok_or_else(|| PipelineError::Config("a [fit] section is required".into()))?;
    let mut out = match kind {
        FitKind::S11 => s11(table)?,
        FitKind::Power => power(fit, table)?,
        FitKind::Decay => decay(fit, table)?,
        FitKind::Losstangent => loss_tangent(cfg, table)?,
        FitKind::Coherent => coherent(fit, table)?,
    };
    out.checks.extend(expect_checks(&fit.expect, &out.primary)?);
    Ok(out)
}

fn expect_checks(expect: &BTreeMap<String, [f64; 2]>, fit: &FitResult<f64>) -> Result<Vec<Check>> {
    expect
        .iter()
        .map(|(name, &[lo, hi])| {
            let v = fit.get(name).ok_or_else(|| {
                PipelineError::Config(format!(
                    "fit.expect names `{name}`, which is not a parameter of {} ({})",
                    fit.model_id,
                    fit.param_names.join(", ")
                ))
            })?;
            Ok(Check::within(format!("{name} in expected band"), lo, hi, v, crate::report::unit_of(name)))
        })
        .collect()
}

fn sigma_column(table: &Table, name: &str) -> Result<Option<Vec<f64>>> {
    if table.has(name) {
        Ok(Some(table.positive(name)?.to_vec()))
    } else {
        Ok(None)
    }
}

pub fn s11(table: &Table) -> Result<FitOutput> {
    let f = table.column("freq_hz")?.to_vec();
    let re = table.column("s11_re")?;
    let im = table.column("s11_im")?;
    if let Some(k) = f.windows(2).position(|w| w[1] <= w[0]) {
        return Err(table.invalid(k + 2, "freq_hz", "frequencies must be strictly increasing"));
    }
    let trace = ResonanceTrace { freq_hz: f, s11: re.iter().zip(im).map(|(&a, &b)| Complex::new(a, b)).collect() };
    let r = fit_s11(&trace, None)?;
    let p = S11Params::from_fit(&r).expect("s11 fit has its own parameter names");
    let residuals: Vec<Value> = trace
        .freq_hz
        .iter()
        .zip(&trace.s11)
        .map(|(&f, z)| {
            let m = s11_model(f, &p);
            json!({ "freq_hz": f, "s11_re": z.re, "s11_im": z.im, "model_re": m.re, "model_im": m.im })
        })
        .collect();
    let results = json!({
        "kind": "s11",
        "fit": fit_record(&r, &table.sha256, json!({ "guess": "automatic" })),
        "derived": { "q_loaded": 1.0 / (1.0 / p.q_int + 1.0 / p.q_ext) },
        "residuals": residuals,
    });
    Ok(FitOutput { results, primary: r, checks: vec![] })
}

/// Photon numbers from either an `n_photons` column or `power_dbm` plus the
/// calibration block.
fn photon_numbers(fit: &FitSection, table: &Table) -> Result<(Vec<f64>, &'static str)> {
    if table.has("n_photons") {
        return Ok((table.positive("n_photons")?.to_vec(), "n_photons"));
    }
    if !table.has("power_dbm") {
        return Err(PipelineError::Schema {
            path: table.path.clone(),
            row: None,
            column: Some("n_photons".into()),
            message: "missing required column (or give power_dbm with a [fit.calibration] block)".into(),
        });
    }
    let cal = fit.calibration.as_ref().ok_or_else(|| {
        PipelineError::Config("power_dbm input needs a [fit.calibration] block to convert to photons".into())
    })?;
    let n = table
        .column("power_dbm")?
        .iter()
        .map(|&dbm| {
            photon_number(
                power_at_device(dbm, cal.attenuation_db),
                cal.frequency_hz,
                cal.kappa_int_rad_s,
                cal.kappa_ext_rad_s,
                cal.detuning_rad_s,
            )
        })
        .collect();
    Ok((n, "power_dbm+calibration"))
}

pub fn power(fit: &FitSection, table: &Table) -> Result<FitOutput> {
    let (n, source) = photon_numbers(fit, table)?;
    let q = table.positive("q_internal")?;
    let sigma = sigma_column(table, "q_sigma")?;
    let frequency_hz = fit
        .frequency_hz
        .or(fit.calibration.as_ref().map(|c| c.frequency_hz))
        .ok_or_else(|| PipelineError::Config("power fits need fit.frequency_hz for the thermal factor".into()))?;
    let points: Vec<PowerSweepPoint<f64>> = (0..q.len())
        .map(|k| PowerSweepPoint { n_photons: n[k], q_internal: q[k], q_sigma: sigma.as_ref().map(|s| s[k]) })
        .collect();
    let mut opts = PowerSweepOptions::new(frequency_hz, fit.temperature_k);
    if fit.log_residuals {
        opts = opts.log();
    }
    let r = fit_power_sweep(&points, &opts)?;
    let model = TlsPowerModel {
        q_low: r.params[0],
        q_high: r.params[1],
        n_c: r.params[2],
        beta: r.params[3],
        frequency_hz,
        temperature_k: fit.temperature_k,
    };
    let highest = q.iter().copied().fold(f64::MIN, f64::max);
    let residuals: Vec<Value> = points
        .iter()
        .map(|p| json!({ "n_photons": p.n_photons, "q_internal": p.q_internal, "model": q_total(p.n_photons, &model) }))
        .collect();
    let settings = json!({
        "frequency_hz": frequency_hz,
        "temperature_k": fit.temperature_k,
        "log_residuals": fit.log_residuals,
        "photon_source": source,
        "calibration": fit.calibration,
    });
    let results = json!({
        "kind": "power",
        "fit": fit_record(&r, &table.sha256, settings),
        "q_high": {
            "fitted": { "value": model.q_high, "ci95": r.ci95[1], "label": "fitted high-power limit of the TLS power model" },
            "highest_measured": { "value": highest, "label": "largest measured Q in the sweep" },
        },
        "residuals": residuals,
    });
    let checks = vec![Check::flag("fit well conditioned", "not ill-posed", !r.ill_posed).non_blocking()];
    Ok(FitOutput { results, primary: r, checks })
}

pub fn decay(fit: &FitSection, table: &Table) -> Result<FitOutput> {
    let t = table.column("time_s")?;
    if let Some(k) = t.iter().position(|&x| x < 0.0) {
        return Err(table.invalid(k + 1, "time_s", "times must be non-negative"));
    }
    let p = table.column("population")?;
    let sigma = sigma_column(table, "population_sigma")?;
    let d = fit_decay(t, p, sigma.as_deref())?;
    if fit.require_distinct {
        d.require_distinct()?;
    }
    let dm = DoubleExpModel { n_in: d.double.params[0], t1_in_s: d.double.params[1], t1_res_s: d.double.params[2] };
    let t1 = d.single.params[0];
    let residuals: Vec<Value> = t
        .iter()
        .zip(p)
        .map(|(&t, &p)| json!({ "time_s": t, "population": p, "double": decay_population(t, &dm), "single": (-t / t1).exp() }))
        .collect();
    let mut derived = serde_json::Map::new();
    if let Some(f) = fit.frequency_hz {
        let q_in = q_from_t1(f, dm.t1_in_s);
        let q_res = q_from_t1(f, dm.t1_res_s);
        let scale = q_from_t1(f, 1.0);
        derived.insert("q_in".into(), json!({ "value": q_in, "ci95": scale * d.double.ci95[1] }));
        derived.insert("q_res".into(), json!({ "value": q_res, "ci95": scale * d.double.ci95[2] }));
        if let Some(a) = fit.area_um2 {
            derived.insert("q_in_per_area_per_um2".into(), json!(q_per_area(q_in, a * 1e-12) * 1e-12));
            derived.insert("q_res_per_area_per_um2".into(), json!(q_per_area(q_res, a * 1e-12) * 1e-12));
        }
    }
    let settings = json!({ "frequency_hz": fit.frequency_hz, "require_distinct": fit.require_distinct });
    let results = json!({
        "kind": "decay",
        "fit": fit_record(&d.double, &table.sha256, settings.clone()),
        "single_exponential": fit_record(&d.single, &table.sha256, settings),
        "degenerate": d.degenerate,
        "preferred_model": d.preferred().model_id,
        "residual_ratio": d.residual_ratio,
        "derived": derived,
        "residuals": residuals,
    });
    Ok(FitOutput { results, primary: d.double, checks: vec![] })
}

/// Simulated metal-air sensitivities for the vacuum-gap capacitor at `gaps_nm`.
pub fn simulated_s_ma(cfg: &RunConfig, gaps_nm: &[f64]) -> Result<Vec<f64>> {
    let mode = ModeSpec { finger_length_m: cfg.mode.finger_length_um * 1e-6, frequency_hz: 5e9, capacitance_f: None };
    let points: Vec<SweepPoint> = gaps_nm
        .iter()
        .map(|&g| SweepPoint {
            spec: cfg.geometry.spec(Variant::VacuumGap, g),
            grid_spacing_nm: cfg.grid_spacing_nm(g),
            mode,
        })
        .collect();
    let pool = thread_pool(cfg.run.threads)?;
    run_points(&points, &cfg.layer.spec(), &pool, None)
        .into_iter()
        .map(|r| r.into_result().map(|rep| rep.s_ma_per_m))
        .collect()
}

pub fn loss_tangent(cfg: &RunConfig, table: &Table) -> Result<FitOutput> {
    let gaps = table.positive("gap_nm")?.to_vec();
    let q = table.positive("q_internal")?;
    let sigma = sigma_column(table, "q_sigma")?;
    let (s_ma, source) = match table.optional("s_ma_per_m") {
        Some(_) => (table.positive("s_ma_per_m")?.to_vec(), "input column s_ma_per_m"),
        None => (simulated_s_ma(cfg, &gaps)?, "simulated vacuum-gap cross-section"),
    };
    let layer = cfg.layer.spec();
    let points: Vec<(f64, f64)> = gaps.iter().copied().zip(q.iter().copied()).collect();
    let lt = fit_loss_tangent(&points, &s_ma, &layer, sigma.as_deref())?;
    let tan = lt.result.params[0];
    let residuals: Vec<Value> = points
        .iter()
        .zip(&s_ma)
        .map(|(&(g, q), &s)| {
            json!({ "gap_nm": g, "q_internal": q, "s_ma_per_m": s, "model": 1.0 / (s * layer.eps_layer * layer.thickness_m * tan) })
        })
        .collect();
    let settings = json!({ "layer": layer, "s_ma_source": source });
    let results = json!({
        "kind": "losstangent",
        "fit": fit_record(&lt.result, &table.sha256, settings),
        "relative_rms": lt.relative_rms,
        "consistent": lt.consistent,
        "residuals": residuals,
    });
    let checks =
        vec![Check::flag("participation model consistent", "relative RMS <= 10%", lt.consistent).non_blocking()];
    Ok(FitOutput { results, primary: lt.result, checks })
}

pub fn coherent(fit: &FitSection, table: &Table) -> Result<FitOutput> {
    let e = table.positive("e_field_v_per_m")?;
    let q = table.positive("q_internal")?;
    let points: Vec<(f64, f64)> = e.iter().copied().zip(q.iter().copied()).collect();
    let r = fit_coherent_tls(&points, fit.temperature_k)?;
    let m = CoherentTlsModel { q0: r.params[0], xi_k_m2_per_v2: r.params[1], temperature_k: fit.temperature_k };
    let residuals: Vec<Value> = points
        .iter()
        .map(|&(e, q)| json!({ "e_field_v_per_m": e, "q_internal": q, "model": q_coherent_tls(e, &m) }))
        .collect();
    let results = json!({
        "kind": "coherent",
        "fit": fit_record(&r, &table.sha256, json!({ "temperature_k": fit.temperature_k, "residuals_on": "ln Q" })),
        "residuals": residuals,
    });
    Ok(FitOutput { results, primary: r, checks: vec![] })
}
