//! Sweeps, fits and figure reproduction on top of `gapsense-core`.
//!
//! Every command returns a [`Report`]: inputs with hashes, results, a check
//! table and an exit code (0 ok, 1 check failed, 2 bad input, 3 numerical
//! failure).

pub mod config;
pub mod data;
pub mod error;
pub mod fit;
pub mod fixtures;
pub mod reference;
pub mod report;
pub mod reproduce;
pub mod simulate;

use std::path::{Path, PathBuf};

use serde_json::json;

pub use config::RunConfig;
pub use error::{PipelineError, Result, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK};
pub use fit::FitKind;
pub use report::Report;
pub use reproduce::Target;

use crate::data::{sha256_hex, write_csv, Table};
use crate::report::{unix_now, Check, InputFile, Inputs};
use crate::simulate::{plot_rows, run_points, sweep_points, thread_pool, PLOT_HEADER};

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_spacing_nm: Option<f64>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(h) = self.grid_spacing_nm {
            cfg.run.grid_spacing_nm = Some(h);
        }
        if let Some(t) = self.threads {
            cfg.run.threads = t;
        }
    }
}

/// Loads the config (or the defaults) and applies the overrides.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn grid_description(cfg: &RunConfig) -> String {
    match cfg.run.grid_spacing_nm {
        Some(h) => format!("{h} nm"),
        None => "gap/20 capped at 10 nm".into(),
    }
}

fn inputs(cfg: &RunConfig, files: Vec<InputFile>) -> Inputs {
    let effective_config = cfg.to_toml();
    Inputs {
        seed: cfg.run.seed,
        files,
        grid: grid_description(cfg),
        config_sha256: sha256_hex(effective_config.as_bytes()),
        effective_config,
    }
}

fn effective_threads(cfg: &RunConfig) -> usize {
    if cfg.run.threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cfg.run.threads
    }
}

fn prepare_out(out: Option<&Path>) -> Result<()> {
    match out {
        Some(dir) => std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e)),
        None => Ok(()),
    }
}

fn finish(report: &Report, out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        report.write(&dir.join("report.json"))?;
    }
    Ok(())
}

/// Solves every (variant, gap) point of the sweep. A failing point does not
/// stop the others: the report carries the partial results and the exit code
/// of the worst failure.
pub fn cmd_simulate(cfg: &RunConfig, out: Option<&Path>) -> Result<Report> {
    let started = unix_now();
    prepare_out(out)?;
    let points = sweep_points(cfg)?;
    let pool = thread_pool(cfg.run.threads)?;
    let dumps = out.filter(|_| cfg.run.dump_fields);
    let results = run_points(&points, &cfg.layer.spec(), &pool, dumps);

    let mut checks = Vec::new();
    let mut error_code = EXIT_OK;
    for r in &results {
        match &r.report {
            Some(p) => {
                let sum = p.p_vacuum + p.p_si + p.p_sio2;
                checks.push(Check::within(
                    format!("bulk participations sum, {}", r.label()),
                    1.0 - 1e-6,
                    1.0 + 1e-6,
                    sum,
                    "1",
                ));
            }
            None => error_code = error_code.max(r.exit_code),
        }
    }
    if let Some(dir) = out {
        for &v in &cfg.sweep.variants {
            write_csv(&dir.join(format!("sweep_{}.csv", v.name())), &PLOT_HEADER, &plot_rows(&results, v))?;
        }
    }
    let failed: Vec<String> = results.iter().filter(|r| r.report.is_none()).map(|r| r.label()).collect();
    let body = json!({ "points": results, "failed_points": failed, "partial": !failed.is_empty() });
    let mut report = Report::new("simulate", inputs(cfg, Vec::new()), body, checks, started, effective_threads(cfg));
    report.error_code = error_code;
    finish(&report, out)?;
    Ok(report)
}

/// Fits one CSV named by `[fit] input`.
pub fn cmd_fit(cfg: &RunConfig, kind: FitKind, out: Option<&Path>) -> Result<Report> {
    let started = unix_now();
    let section =
        cfg.fit.as_ref().ok_or_else(|| PipelineError::Config("a [fit] section with `input` is required".into()))?;
    let table = Table::read(&section.input)?;
    prepare_out(out)?;
    let fitted = fit::run_fit(cfg, kind, &table)?;
    let files = vec![InputFile { path: table.path.display().to_string(), sha256: table.sha256.clone() }];
    let report = Report::new(
        format!("fit --kind {}", kind.name()),
        inputs(cfg, files),
        fitted.results,
        fitted.checks,
        started,
        effective_threads(cfg),
    );
    if let Some(dir) = out {
        let path = dir.join("fit.json");
        let text = serde_json::to_string_pretty(&report.results).expect("results are plain JSON");
        std::fs::write(&path, text + "\n").map_err(|e| PipelineError::io(&path, e))?;
    }
    finish(&report, out)?;
    Ok(report)
}

/// Runs one figure or table recipe end to end.
pub fn cmd_reproduce(cfg: &RunConfig, target: Target, out: Option<&Path>) -> Result<Report> {
    let started = unix_now();
    prepare_out(out)?;
    let outcome = reproduce::Recipe::new(cfg, out)?.run(target)?;
    let report = Report::new(
        format!("reproduce {}", target.name()),
        inputs(cfg, outcome.files),
        outcome.results,
        outcome.checks,
        started,
        effective_threads(cfg),
    );
    finish(&report, out)?;
    Ok(report)
}

/// Default output directory for a command.
pub fn default_out(command: &str) -> PathBuf {
    PathBuf::from("out").join(command)
}
