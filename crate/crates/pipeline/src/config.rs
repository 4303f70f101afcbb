//! Run configuration: sectioned `key = value` TOML.
//!
//! ```toml
//! [run]
//! seed = 7
//! threads = 4
//! grid_spacing_nm = 5      # omit for gap / 20 capped at 10 nm
//! dump_fields = false
//!
//! [geometry]
//! finger_width_nm = 1000
//! n_finger_pairs = 3
//! membrane_thickness_nm = 220
//! metal_thickness_nm = 80
//! oxide_thickness_nm = 3000
//! handle_depth_nm = 1000
//! padding_factor = 3
//! eps_si = 11.7
//! eps_sio2 = 3.9
//!
//! [sweep]
//! variants = ["vacuum_gap"]
//! gaps_nm = [100, 200, 500, 1000]
//!
//! [layer]
//! thickness_nm = 3
//! eps = 10
//!
//! [mode]
//! finger_length_um = 39
//! frequency_hz = [5.94e9, 5.33e9, 5.41e9, 4.96e9]   # one per gap, or one for all
//! e_c_hz = [461e6, 389e6, 362e6, 342e6]             # optional; else C from the solve
//!
//! [fit]
//! input = "decay.csv"
//! frequency_hz = 5.94e9
//! temperature_k = 0.01
//! log_residuals = true
//!
//! [fit.calibration]          # only for power sweeps given in dBm
//! attenuation_db = 80
//! frequency_hz = 9.8e9
//! kappa_int_rad_s = 2e5
//! kappa_ext_rad_s = 3.6e6
//!
//! [fit.expect]               # optional pass/fail bands on fitted parameters
//! n_c = [20, 80]
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gapsense_core::fieldsolver::{ModeSpec, ThinLayerSpec};
use gapsense_core::geometry::{GeometrySpec, Variant};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::reference;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub layer: LayerSection,
    #[serde(default)]
    pub mode: ModeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// Worker threads for sweeps; 0 picks the number of cores.
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_spacing_nm: Option<f64>,
    /// Write binary potential and |E| dumps for every sweep point.
    pub dump_fields: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixtures_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub finger_width_nm: f64,
    pub n_finger_pairs: usize,
    pub membrane_thickness_nm: f64,
    pub metal_thickness_nm: f64,
    pub oxide_thickness_nm: f64,
    pub handle_depth_nm: f64,
    pub padding_factor: f64,
    pub eps_si: f64,
    pub eps_sio2: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let d = GeometrySpec::<f64>::new(Variant::VacuumGap, 1e-6, 100e-9);
        Self {
            finger_width_nm: d.finger_width * 1e9,
            n_finger_pairs: d.n_finger_pairs,
            membrane_thickness_nm: d.membrane_thickness * 1e9,
            metal_thickness_nm: d.metal_thickness * 1e9,
            oxide_thickness_nm: d.oxide_thickness * 1e9,
            handle_depth_nm: d.handle_depth * 1e9,
            padding_factor: d.padding_factor,
            eps_si: d.eps_si,
            eps_sio2: d.eps_sio2,
        }
    }
}

impl GeometrySection {
    pub fn spec(&self, variant: Variant, gap_nm: f64) -> GeometrySpec<f64> {
        GeometrySpec {
            variant,
            finger_width: self.finger_width_nm * 1e-9,
            gap_width: gap_nm * 1e-9,
            n_finger_pairs: self.n_finger_pairs,
            membrane_thickness: self.membrane_thickness_nm * 1e-9,
            metal_thickness: self.metal_thickness_nm * 1e-9,
            oxide_thickness: self.oxide_thickness_nm * 1e-9,
            handle_depth: self.handle_depth_nm * 1e-9,
            padding_factor: self.padding_factor,
            eps_si: self.eps_si,
            eps_sio2: self.eps_sio2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub variants: Vec<Variant>,
    pub gaps_nm: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { variants: vec![Variant::VacuumGap], gaps_nm: reference::GAPS_NM.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayerSection {
    pub thickness_nm: f64,
    pub eps: f64,
}

impl Default for LayerSection {
    fn default() -> Self {
        Self { thickness_nm: 3.0, eps: 10.0 }
    }
}

impl LayerSection {
    pub fn spec(&self) -> ThinLayerSpec<f64> {
        ThinLayerSpec { thickness_m: self.thickness_nm * 1e-9, eps_layer: self.eps }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeSection {
    pub finger_length_um: f64,
    /// One entry per swept gap, or a single entry used for every gap.
    pub frequency_hz: Vec<f64>,
    /// Charging energies fixing the zero-point capacitance per gap; empty
    /// means the simulated capacitance times the finger length.
    pub e_c_hz: Vec<f64>,
}

impl Default for ModeSection {
    fn default() -> Self {
        Self {
            finger_length_um: 39.0,
            frequency_hz: reference::QUBITS.iter().map(|q| q.f_ge_hz).collect(),
            e_c_hz: reference::QUBITS.iter().map(|q| q.e_c_hz).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub input: PathBuf,
    /// Resonator or qubit frequency; required for power sweeps and used to
    /// convert decay times to Q.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    /// Power sweeps only: fit on `ln Q` instead of `Q`.
    #[serde(default = "default_true")]
    pub log_residuals: bool,
    /// Decay fits only: fail when the two time constants are indistinguishable.
    #[serde(default)]
    pub require_distinct: bool,
    /// Footprint used for Q/A in decay reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_um2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, [f64; 2]>,
}

fn default_temperature() -> f64 {
    reference::BATH_TEMPERATURE_K
}

fn default_true() -> bool {
    true
}

/// Converts source power in dBm to intracavity photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    /// Total line attenuation between source and device, dB.
    pub attenuation_db: f64,
    pub frequency_hz: f64,
    pub kappa_int_rad_s: f64,
    pub kappa_ext_rad_s: f64,
    #[serde(default)]
    pub detuning_rad_s: f64,
}

/// Default grid spacing for a gap: gap / 20, never coarser than 10 nm.
pub fn default_grid_spacing_nm(gap_nm: f64) -> f64 {
    (gap_nm / 20.0).min(10.0)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            PipelineError::Config(m) => PipelineError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// The configuration as it was actually used; reparses to an equal value.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let Some(fit) = &mut self.fit {
            if fit.input.is_relative() {
                fit.input = base.join(&fit.input);
            }
        }
        if let Some(dir) = &mut self.run.fixtures_dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
    }

    pub fn grid_spacing_nm(&self, gap_nm: f64) -> f64 {
        self.run.grid_spacing_nm.unwrap_or_else(|| default_grid_spacing_nm(gap_nm))
    }

    /// Mode parameters for the `k`-th swept gap.
    pub fn mode_for(&self, k: usize) -> Result<ModeSpec<f64>> {
        let pick = |v: &[f64], what: &str| -> Result<Option<f64>> {
            match v.len() {
                0 => Ok(None),
                1 => Ok(Some(v[0])),
                n if n == self.sweep.gaps_nm.len() => Ok(Some(v[k])),
                n => Err(PipelineError::Config(format!(
                    "mode.{what} has {n} entries for {} gaps (give one, or one per gap)",
                    self.sweep.gaps_nm.len()
                ))),
            }
        };
        let frequency_hz = pick(&self.mode.frequency_hz, "frequency_hz")?
            .ok_or_else(|| PipelineError::Config("mode.frequency_hz must not be empty".into()))?;
        let capacitance_f =
            pick(&self.mode.e_c_hz, "e_c_hz")?.map(gapsense_core::circuits::capacitance_from_charging_energy);
        Ok(ModeSpec { finger_length_m: self.mode.finger_length_um * 1e-6, frequency_hz, capacitance_f })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.sweep.variants.is_empty() {
            return bad("sweep.variants is empty".into());
        }
        if self.sweep.gaps_nm.is_empty() {
            return bad("sweep.gaps_nm is empty".into());
        }
        if let Some(g) = self.sweep.gaps_nm.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return bad(format!("sweep.gaps_nm contains a non-positive gap {g}"));
        }
        if let Some(h) = self.run.grid_spacing_nm {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("run.grid_spacing_nm must be positive, got {h}"));
            }
        }
        if !(self.mode.finger_length_um > 0.0) {
            return bad("mode.finger_length_um must be positive".into());
        }
        for k in 0..self.sweep.gaps_nm.len() {
            self.mode_for(k)?;
        }
        self.layer.spec().validate()?;
        for &v in &self.sweep.variants {
            self.geometry.spec(v, self.sweep.gaps_nm[0]).validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = RunConfig::parse("[run]\nseed = 3\n").unwrap();
        assert_eq!(c.run.seed, 3);
        assert_eq!(c.sweep.gaps_nm, vec![100.0, 200.0, 500.0, 1000.0]);
        assert_eq!(c.sweep.variants, vec![Variant::VacuumGap]);
        c.validate().unwrap();
    }

    #[test]
    fn effective_config_round_trips() {
        let text = r#"
            [run]
            seed = 11
            grid_spacing_nm = 7.5
            [sweep]
            variants = ["bulk_substrate", "vacuum_gap"]
            gaps_nm = [100, 300]
            [mode]
            frequency_hz = [9e9]
            e_c_hz = []
            [fit]
            input = "x.csv"
            frequency_hz = 9.8e9
            [fit.calibration]
            attenuation_db = 70
            frequency_hz = 9.8e9
            kappa_int_rad_s = 1e5
            kappa_ext_rad_s = 2e6
            [fit.expect]
            beta = [0.3, 0.6]
        "#;
        let c = RunConfig::parse(text).unwrap();
        let again = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn empty_sweep_is_a_config_error() {
        let c = RunConfig::parse("[sweep]\ngaps_nm = []\n").unwrap();
        assert!(matches!(c.validate(), Err(PipelineError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[run]\nsed = 3\n").is_err());
    }

    #[test]
    fn mismatched_mode_lists_are_rejected() {
        let c = RunConfig::parse("[mode]\nfrequency_hz = [1e9, 2e9]\n").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_spacing_is_capped() {
        assert_eq!(default_grid_spacing_nm(100.0), 5.0);
        assert_eq!(default_grid_spacing_nm(1000.0), 10.0);
    }
}
