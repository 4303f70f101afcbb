//! Geometry -> solver -> participation sweeps over (variant, gap) points.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use gapsense_core::fieldsolver::{
    participation_report, solve_potential, write_field_dump, DumpQuantity, FieldSolution, ModeSpec,
    ParticipationReport, ThinLayerSpec, DEFAULT_TOLERANCE,
};
use gapsense_core::geometry::{build_cross_section, extract_interfaces, GeometrySpec, Variant};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{PipelineError, Result};

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub spec: GeometrySpec<f64>,
    pub grid_spacing_nm: f64,
    pub mode: ModeSpec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointResult {
    pub variant: Variant,
    pub gap_nm: f64,
    pub grid_spacing_nm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ParticipationReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub exit_code: i32,
    #[serde(skip)]
    pub elapsed_s: f64,
}

impl PointResult {
    pub fn label(&self) -> String {
        format!("{} at {} nm", self.variant.name(), self.gap_nm)
    }

    pub fn into_result(self) -> Result<ParticipationReport<f64>> {
        let label = self.label();
        match self.report {
            Some(r) => Ok(r),
            None => {
                Err(PipelineError::SweepPoint { label, message: self.error.unwrap_or_default(), code: self.exit_code })
            }
        }
    }
}

/// Gap in nm, rounded to a picometre so metre round trips print cleanly.
pub fn gap_nm(spec: &GeometrySpec<f64>) -> f64 {
    (spec.gap_width * 1e12).round() / 1e3
}

/// Builds, solves and reduces one cross-section.
pub fn simulate_point(
    spec: &GeometrySpec<f64>,
    grid_spacing_m: f64,
    layer: &ThinLayerSpec<f64>,
    mode: &ModeSpec<f64>,
) -> Result<(ParticipationReport<f64>, FieldSolution<f64>)> {
    let map = build_cross_section(spec, grid_spacing_m)?;
    let sol = solve_potential(&map, 1.0, DEFAULT_TOLERANCE)?;
    let ifaces = extract_interfaces(&map);
    let report = participation_report(&map, &sol, &ifaces, layer, mode)?;
    Ok((report, sol))
}

pub fn sweep_points(cfg: &RunConfig) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::new();
    for &variant in &cfg.sweep.variants {
        for (k, &gap) in cfg.sweep.gaps_nm.iter().enumerate() {
            out.push(SweepPoint {
                spec: cfg.geometry.spec(variant, gap),
                grid_spacing_nm: cfg.grid_spacing_nm(gap),
                mode: cfg.mode_for(k)?,
            });
        }
    }
    Ok(out)
}

pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("cannot start {threads} worker threads: {e}")))
}

/// Runs every point in the pool. Results come back in input order whatever
/// the execution order; each solve is sequential, so values do not depend on
/// the thread count.
pub fn run_points(
    points: &[SweepPoint],
    layer: &ThinLayerSpec<f64>,
    pool: &rayon::ThreadPool,
    dump_dir: Option<&Path>,
) -> Vec<PointResult> {
    pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let start = std::time::Instant::now();
                let outcome =
                    simulate_point(&p.spec, p.grid_spacing_nm * 1e-9, layer, &p.mode).and_then(|(report, sol)| {
                        if let Some(dir) = dump_dir {
                            dump_fields(dir, p, &sol)?;
                        }
                        Ok(report)
                    });
                let (report, error, exit_code) = match outcome {
                    Ok(r) => (Some(r), None, 0),
                    Err(e) => (None, Some(e.to_string()), e.exit_code()),
                };
                PointResult {
                    variant: p.spec.variant,
                    gap_nm: gap_nm(&p.spec),
                    grid_spacing_nm: p.grid_spacing_nm,
                    report,
                    error,
                    exit_code,
                    elapsed_s: start.elapsed().as_secs_f64(),
                }
            })
            .collect()
    })
}

fn dump_fields(dir: &Path, p: &SweepPoint, sol: &FieldSolution<f64>) -> Result<()> {
    let stem = format!("field_{}_{}nm", p.spec.variant.name(), gap_nm(&p.spec));
    for (suffix, q) in [("potential", DumpQuantity::Potential), ("efield", DumpQuantity::FieldMagnitude)] {
        let path = dir.join(format!("{stem}_{suffix}.bin"));
        let f = File::create(&path).map_err(|e| PipelineError::io(&path, e))?;
        write_field_dump(sol, q, BufWriter::new(f)).map_err(|e| PipelineError::io(&path, e))?;
    }
    Ok(())
}

/// Plot-ready rows `(gap_nm, s_ma, s_ms, s_sa, p_vacuum, e_zpf_max)` for one variant.
pub fn plot_rows(results: &[PointResult], variant: Variant) -> Vec<Vec<f64>> {
    results
        .iter()
        .filter(|r| r.variant == variant)
        .filter_map(|r| {
            r.report
                .as_ref()
                .map(|p| vec![r.gap_nm, p.s_ma_per_m, p.s_ms_per_m, p.s_sa_per_m, p.p_vacuum, p.e_zpf_max_v_per_m])
        })
        .collect()
}

pub const PLOT_HEADER: [&str; 6] =
    ["gap_nm", "s_ma_per_m", "s_ms_per_m", "s_sa_per_m", "p_vacuum", "e_zpf_max_v_per_m"];
