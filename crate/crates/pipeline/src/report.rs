//! JSON reports and the human-readable check table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use gapsense_core::fitting::FitResult;
use serde::Serialize;
use serde_json::Value;

use crate::error::{PipelineError, Result, EXIT_CHECK_FAILED, EXIT_OK};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub command: String,
    pub inputs: Inputs,
    /// Deterministic for a fixed config and seed: no timestamps, paths or
    /// thread counts.
    pub results: Value,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
    /// Exit code of an error that left the results partial.
    #[serde(skip)]
    pub error_code: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Inputs {
    pub seed: u64,
    pub files: Vec<InputFile>,
    pub grid: String,
    pub config_sha256: String,
    pub effective_config: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub threads: usize,
}

/// One row of the check table. Non-blocking checks are reported but do not
/// change the exit code.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub obtained: f64,
    pub unit: String,
    pub pass: bool,
    pub blocking: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, obtained: f64, unit: &str, pass: bool) -> Self {
        Self { name: name.into(), expected: expected.into(), obtained, unit: unit.into(), pass, blocking: true }
    }

    pub fn within(name: impl Into<String>, lo: f64, hi: f64, obtained: f64, unit: &str) -> Self {
        Self::new(name, format!("[{lo:.4e}, {hi:.4e}]"), obtained, unit, obtained >= lo && obtained <= hi)
    }

    pub fn relative(name: impl Into<String>, target: f64, tol: f64, obtained: f64, unit: &str) -> Self {
        let pass = ((obtained - target) / target).abs() <= tol;
        Self::new(name, format!("{target:.4e} +/- {:.0}%", tol * 100.0), obtained, unit, pass)
    }

    /// `obtained` within a multiplicative factor of `target`.
    pub fn factor(name: impl Into<String>, target: f64, factor: f64, obtained: f64, unit: &str) -> Self {
        let pass = obtained >= target / factor && obtained <= target * factor;
        Self::new(name, format!("{target:.4e} within x{factor}"), obtained, unit, pass)
    }

    pub fn at_least(name: impl Into<String>, lo: f64, obtained: f64, unit: &str) -> Self {
        Self::new(name, format!(">= {lo:.4e}"), obtained, unit, obtained >= lo)
    }

    pub fn flag(name: impl Into<String>, expected: impl Into<String>, pass: bool) -> Self {
        Self::new(name, expected, if pass { 1.0 } else { 0.0 }, "bool", pass)
    }

    pub fn non_blocking(mut self) -> Self {
        self.blocking = false;
        self
    }
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        inputs: Inputs,
        results: Value,
        checks: Vec<Check>,
        started: u64,
        threads: usize,
    ) -> Self {
        Self {
            tool: Tool { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
            command: command.into(),
            inputs,
            results,
            checks,
            provenance: Provenance { started_unix_s: started, finished_unix_s: unix_now(), threads },
            error_code: EXIT_OK,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.blocking)
    }

    pub fn exit_code(&self) -> i32 {
        let checks = if self.passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
        checks.max(self.error_code)
    }

    /// The results section exactly as written to the JSON report.
    pub fn results_json(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("results are plain JSON")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain JSON")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| PipelineError::io(path, e))
    }

    pub fn check_table(&self) -> String {
        let mut s = String::new();
        if self.checks.is_empty() {
            return s;
        }
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
        let _ = writeln!(s, "{:<w$}  {:<34}  {:>14}  {:<10}  result", "check", "expected", "obtained", "unit");
        for c in &self.checks {
            let verdict = match (c.pass, c.blocking) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "FAIL (non-blocking)",
            };
            let _ = writeln!(s, "{:<w$}  {:<34}  {:>14.6e}  {:<10}  {verdict}", c.name, c.expected, c.obtained, c.unit);
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} {} :: {}\n", self.tool.name, self.tool.version, self.command);
        let _ = writeln!(s, "seed {}  grid {}", self.inputs.seed, self.inputs.grid);
        for f in &self.inputs.files {
            let _ = writeln!(s, "input {} sha256 {}", f.path, &f.sha256[..16.min(f.sha256.len())]);
        }
        s.push_str(&self.check_table());
        let n_fail = self.checks.iter().filter(|c| !c.pass && c.blocking).count();
        let _ = writeln!(
            s,
            "{}",
            if n_fail == 0 { "all checks passed".to_string() } else { format!("{n_fail} check(s) failed") }
        );
        s
    }
}

/// Unit of a fitted parameter, from its name.
pub fn unit_of(name: &str) -> &'static str {
    match name {
        "xi_k_m2_per_v2" => "K m^2/V^2",
        "n_c" | "n_in" => "photons",
        n if n.ends_with("_hz") => "Hz",
        n if n.ends_with("_rad") => "rad",
        n if n.ends_with("_s") => "s",
        _ => "1",
    }
}

/// A fit result with its provenance, as embedded in reports.
pub fn fit_record(fit: &FitResult<f64>, input_sha256: &str, settings: Value) -> Value {
    let units: BTreeMap<&str, &str> = fit.param_names.iter().map(|n| (n.as_str(), unit_of(n))).collect();
    let params: BTreeMap<&str, Value> = fit
        .param_names
        .iter()
        .zip(fit.params.iter().zip(&fit.ci95))
        .map(|(n, (&v, &ci))| (n.as_str(), serde_json::json!({ "value": v, "ci95": ci, "unit": unit_of(n) })))
        .collect();
    serde_json::json!({
        "provenance": { "input_sha256": input_sha256, "model_id": fit.model_id, "settings": settings },
        "parameters": params,
        "units": units,
        "fit": fit,
    })
}
