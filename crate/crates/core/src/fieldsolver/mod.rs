//! Electrostatics on a [`RegionMap`]: potential, fields, energies, capacitance,
//! participation ratios and surface sensitivities.
//!
//! Potentials live at cell centres. Conductors are Dirichlet regions whose
//! surface coincides with the cell faces; the outer boundary is insulating
//! (zero normal derivative). Permittivity on faces between two dielectrics is
//! the harmonic mean, which makes normal displacement continuous across
//! material boundaries.
//!
//! The cell field is built from face fluxes: the normal field on a cell's side
//! of a face is `D_face / (eps0 eps_cell)`, and the cell value averages its two
//! faces per axis. Inside a uniform material this is the centred difference;
//! at a dielectric interface it picks the field of the cell's own side.

mod dump;
mod multigrid;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CellRect, InterfaceSet, RegionMap, ELECTRODE_NEGATIVE, ELECTRODE_POSITIVE};
use crate::scalar::{consts, Real};

pub use dump::{read_field_dump, write_field_dump, DumpQuantity, FieldDump};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("solver did not converge: relative residual {residual:e} after {sweeps} fine-grid sweeps")]
    NoConvergence { residual: f64, sweeps: usize },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
}

/// Iteration cap expressed in fine-grid smoothing sweeps.
pub const MAX_FINE_SWEEPS: usize = 1_000_000;
/// Relative residual used by the report pipeline.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Solved electrostatic state of one cross-section.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSolution<T> {
    pub nx: usize,
    pub ny: usize,
    pub grid_spacing: T,
    /// Volts, row-major.
    pub potential: Vec<T>,
    /// `[E_x, E_y]` in V/m at cell centres; zero inside conductors.
    pub e_field: Vec<[T; 2]>,
    /// J/m^3 at cell centres.
    pub energy_density: Vec<T>,
    /// Potential difference between the electrodes; they sit at +V/2 and -V/2.
    pub applied_voltage: T,
    /// J/m along the finger direction.
    pub total_energy_per_length: T,
    pub relative_residual: T,
    pub iterations: usize,
    pub fine_sweeps: usize,
    pub gap_regions: Vec<CellRect>,
}

impl<T: Real> FieldSolution<T> {
    pub fn field_magnitude(&self, k: usize) -> T {
        let [ex, ey] = self.e_field[k];
        (ex * ex + ey * ey).sqrt()
    }

    /// Largest |E| over the gap regions, V/m.
    pub fn max_gap_field(&self) -> T {
        self.gap_cells().map(|k| self.field_magnitude(k)).fold(T::zero(), T::max)
    }

    /// Mean |E| over the gap regions, V/m.
    pub fn mean_gap_field(&self) -> T {
        let (sum, n) = self.gap_cells().fold((T::zero(), 0usize), |(s, n), k| (s + self.field_magnitude(k), n + 1));
        if n == 0 {
            T::zero()
        } else {
            sum / T::from_usize_lossy(n)
        }
    }

    fn gap_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.gap_regions.iter().flat_map(move |r| r.cells().map(move |(i, j)| j * self.nx + i))
    }
}

fn harmonic<T: Real>(a: T, b: T) -> T {
    T::two() * a * b / (a + b)
}

/// Solves `div(eps grad phi) = 0` with the electrodes held at `+voltage/2`
/// (id 1) and `-voltage/2` (id 2).
pub fn solve_potential<T: Real>(map: &RegionMap<T>, voltage: T, tol: T) -> Result<FieldSolution<T>, SolverError> {
    if !(tol > T::zero() && tol <= T::lit(1e-4)) {
        return Err(SolverError::InvalidInput(format!("tolerance must lie in (0, 1e-4], got {tol}")));
    }
    if !voltage.is_finite() {
        return Err(SolverError::InvalidInput("voltage must be finite".into()));
    }
    map.validate().map_err(|e| SolverError::InvalidMap(e.to_string()))?;

    let (nx, ny) = (map.nx, map.ny);
    let n = nx * ny;
    let half_v = voltage * T::half();
    let electrode_v = |k: usize| match map.electrode_ids[k] {
        ELECTRODE_POSITIVE => half_v,
        ELECTRODE_NEGATIVE => -half_v,
        _ => T::zero(),
    };
    let eps: Vec<T> = map.cells.iter().map(|&c| map.eps_r(c)).collect();
    let is_metal: Vec<bool> = map.cells.iter().map(|c| c.is_metal()).collect();

    let mut level = multigrid::Level {
        nx,
        ny,
        active: is_metal.iter().map(|m| !m).collect(),
        cx: vec![T::zero(); (nx - 1) * ny],
        cy: vec![T::zero(); nx * (ny - 1)],
        diag: vec![T::zero(); n],
    };
    let mut b = vec![T::zero(); n];
    let mut couple = |k: usize, nb: usize, slot: &mut T| match (is_metal[k], is_metal[nb]) {
        (false, false) => {
            let c = harmonic(eps[k], eps[nb]);
            *slot = c;
            level.diag[k] += c;
            level.diag[nb] += c;
        }
        (false, true) => {
            let c = T::two() * eps[k];
            level.diag[k] += c;
            b[k] += c * electrode_v(nb);
        }
        (true, false) => {
            let c = T::two() * eps[nb];
            level.diag[nb] += c;
            b[nb] += c * electrode_v(k);
        }
        (true, true) => {}
    };
    let mut cx = std::mem::take(&mut level.cx);
    let mut cy = std::mem::take(&mut level.cy);
    for j in 0..ny {
        for i in 0..nx - 1 {
            let k = j * nx + i;
            couple(k, k + 1, &mut cx[j * (nx - 1) + i]);
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx {
            let k = j * nx + i;
            couple(k, k + nx, &mut cy[j * nx + i]);
        }
    }
    level.cx = cx;
    level.cy = cy;

    let mut hierarchy = multigrid::Hierarchy::new(level);
    let mut x = vec![T::zero(); n];
    let outcome = multigrid::pcg(&mut hierarchy, &b, &mut x, tol, MAX_FINE_SWEEPS);
    if !outcome.converged {
        return Err(SolverError::NoConvergence {
            residual: outcome.relative_residual.to_f64_lossy(),
            sweeps: outcome.fine_sweeps,
        });
    }
    let potential: Vec<T> = (0..n).map(|k| if is_metal[k] { electrode_v(k) } else { x[k] }).collect();

    let h = map.grid_spacing;
    let half_h = h * T::half();
    let eps0 = T::lit(consts::EPSILON_0);
    let mut e_field = vec![[T::zero(); 2]; n];
    let mut energy_density = vec![T::zero(); n];
    // Normal field on cell k's side of the face towards nb, for a potential
    // increase `dphi` from k to nb (positive axis direction).
    let face_field = |k: usize, nb: usize, toward_positive: bool| -> T {
        let (d, ratio) = if is_metal[nb] { (half_h, T::one()) } else { (h, harmonic(eps[k], eps[nb]) / eps[k]) };
        let dphi = if toward_positive { potential[nb] - potential[k] } else { potential[k] - potential[nb] };
        -ratio * dphi / d
    };
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if is_metal[k] {
                continue;
            }
            let left = if i > 0 { face_field(k, k - 1, false) } else { T::zero() };
            let right = if i + 1 < nx { face_field(k, k + 1, true) } else { T::zero() };
            let down = if j > 0 { face_field(k, k - nx, false) } else { T::zero() };
            let up = if j + 1 < ny { face_field(k, k + nx, true) } else { T::zero() };
            let ex = (left + right) * T::half();
            let ey = (down + up) * T::half();
            e_field[k] = [ex, ey];
            energy_density[k] = eps0 * eps[k] * (ex * ex + ey * ey) * T::half();
        }
    }
    let cell_area = h * h;
    let total_energy_per_length = energy_density.iter().copied().sum::<T>() * cell_area;

    Ok(FieldSolution {
        nx,
        ny,
        grid_spacing: h,
        potential,
        e_field,
        energy_density,
        applied_voltage: voltage,
        total_energy_per_length,
        relative_residual: outcome.relative_residual,
        iterations: outcome.iterations,
        fine_sweeps: outcome.fine_sweeps,
        gap_regions: map.gap_regions.clone(),
    })
}

/// Capacitance per unit length, `2 U / V^2`, F/m.
pub fn capacitance<T: Real>(sol: &FieldSolution<T>) -> T {
    T::two() * sol.total_energy_per_length / (sol.applied_voltage * sol.applied_voltage)
}

/// Fractions of the field energy stored in each bulk material.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkParticipation<T> {
    pub vacuum: T,
    pub silicon: T,
    pub oxide: T,
}

pub fn participation<T: Real>(sol: &FieldSolution<T>, map: &RegionMap<T>) -> BulkParticipation<T> {
    use crate::geometry::MaterialLabel::*;
    let mut acc = [T::zero(); 3];
    for (&label, &u) in map.cells.iter().zip(&sol.energy_density) {
        match label {
            Vacuum => acc[0] += u,
            Silicon => acc[1] += u,
            SiliconDioxide => acc[2] += u,
            Metal => {}
        }
    }
    let total: T = acc.iter().copied().sum();
    BulkParticipation { vacuum: acc[0] / total, silicon: acc[1] / total, oxide: acc[2] / total }
}

/// Surface sensitivities of the three interface classes, 1/m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSensitivity<T> {
    pub ma: T,
    pub ms: T,
    pub sa: T,
}

/// Integrates the vacuum-permittivity energy density `eps0 |E|^2 / 2` over
/// each interface and normalizes by the total energy.
///
/// The field of a segment is the cell field one cell off the interface on the
/// side its normal points to: into the dielectric for metal interfaces, into
/// vacuum for substrate-air. No displacement-continuity rescaling is applied
/// inside the notional thin layer. An empty class integrates to zero.
pub fn surface_sensitivity<T: Real>(sol: &FieldSolution<T>, ifaces: &InterfaceSet<T>) -> SurfaceSensitivity<T> {
    let eps0 = T::lit(consts::EPSILON_0);
    let integrate = |segs: &[crate::geometry::InterfaceSegment<T>]| -> T {
        let sum: T = segs
            .iter()
            .map(|s| {
                let e = sol.field_magnitude(s.sample_cell);
                eps0 * e * e * T::half() * s.length
            })
            .sum();
        sum / sol.total_energy_per_length
    };
    SurfaceSensitivity { ma: integrate(&ifaces.ma), ms: integrate(&ifaces.ms), sa: integrate(&ifaces.sa) }
}

/// Parasitic surface layer: thickness and relative permittivity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinLayerSpec<T> {
    pub thickness_m: T,
    pub eps_layer: T,
}

impl<T: Real> Default for ThinLayerSpec<T> {
    fn default() -> Self {
        Self { thickness_m: T::lit(3e-9), eps_layer: T::lit(10.0) }
    }
}

impl<T: Real> ThinLayerSpec<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.thickness_m > T::zero() && self.eps_layer >= T::one() {
            Ok(())
        } else {
            Err(SolverError::InvalidInput(format!(
                "thin layer needs t > 0 and eps >= 1, got t = {} and eps = {}",
                self.thickness_m, self.eps_layer
            )))
        }
    }
}

/// Energy fraction held by a thin layer of the given sensitivity: `s eps t`.
pub fn thin_layer_participation<T: Real>(sensitivity: T, layer: &ThinLayerSpec<T>) -> T {
    sensitivity * layer.eps_layer * layer.thickness_m
}

/// Field distribution rescaled to the zero-point voltage of a mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroPointField<T> {
    /// `sqrt(hbar omega / (2 C))`, V.
    pub v_zpf: T,
    /// Largest |E| in the vacuum gaps at the zero-point voltage, V/m.
    pub e_zpf_max: T,
    /// Mean |E| over the vacuum gaps at the zero-point voltage, V/m.
    pub e_zpf_mean: T,
    /// |E| per cell at the zero-point voltage, V/m.
    pub magnitude: Vec<T>,
}

/// Rescales a solution to the zero-point voltage of a mode of total
/// capacitance `c_total` (F) at `frequency` (Hz).
pub fn zero_point_field<T: Real>(
    sol: &FieldSolution<T>,
    c_total: T,
    frequency: T,
) -> Result<ZeroPointField<T>, SolverError> {
    if !(c_total > T::zero() && frequency > T::zero()) {
        return Err(SolverError::InvalidInput("capacitance and frequency must be positive".into()));
    }
    if sol.applied_voltage == T::zero() {
        return Err(SolverError::InvalidInput("solution has zero applied voltage".into()));
    }
    let omega = T::two() * T::PI() * frequency;
    let v_zpf = (T::lit(consts::HBAR) * omega / (T::two() * c_total)).sqrt();
    let scale = v_zpf / sol.applied_voltage.abs();
    let magnitude = (0..sol.e_field.len()).map(|k| sol.field_magnitude(k) * scale).collect();
    Ok(ZeroPointField {
        v_zpf,
        e_zpf_max: sol.max_gap_field() * scale,
        e_zpf_mean: sol.mean_gap_field() * scale,
        magnitude,
    })
}

/// Everything the report pipeline extracts from one solved cross-section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticipationReport<T> {
    pub p_vacuum: T,
    pub p_si: T,
    pub p_sio2: T,
    pub s_ma_per_m: T,
    pub s_ms_per_m: T,
    pub s_sa_per_m: T,
    pub p_ma: T,
    pub p_ms: T,
    pub p_sa: T,
    pub capacitance_per_length_f_per_m: T,
    pub capacitance_total_f: T,
    pub finger_length_m: T,
    pub applied_voltage_v: T,
    pub e_max_gap_v_per_m: T,
    pub e_mean_gap_v_per_m: T,
    pub v_zpf_v: T,
    pub e_zpf_max_v_per_m: T,
    pub e_zpf_mean_v_per_m: T,
    pub zpf_capacitance_f: T,
    pub zpf_frequency_hz: T,
    pub layer: ThinLayerSpec<T>,
    pub grid: GridMetadata<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata<T> {
    pub grid_spacing_m: T,
    pub nx: usize,
    pub ny: usize,
    pub relative_residual: T,
    pub iterations: usize,
    pub fine_sweeps: usize,
}

/// Mode parameters used for the zero-point normalization. When `capacitance_f`
/// is absent the simulated `C/L x finger_length` is used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec<T> {
    pub finger_length_m: T,
    pub frequency_hz: T,
    pub capacitance_f: Option<T>,
}

pub fn participation_report<T: Real>(
    map: &RegionMap<T>,
    sol: &FieldSolution<T>,
    ifaces: &InterfaceSet<T>,
    layer: &ThinLayerSpec<T>,
    mode: &ModeSpec<T>,
) -> Result<ParticipationReport<T>, SolverError> {
    layer.validate()?;
    if !(mode.finger_length_m > T::zero()) {
        return Err(SolverError::InvalidInput("finger length must be positive".into()));
    }
    let bulk = participation(sol, map);
    let s = surface_sensitivity(sol, ifaces);
    let c_per_len = capacitance(sol);
    let c_total = c_per_len * mode.finger_length_m;
    let zpf_c = mode.capacitance_f.unwrap_or(c_total);
    let zpf = zero_point_field(sol, zpf_c, mode.frequency_hz)?;
    Ok(ParticipationReport {
        p_vacuum: bulk.vacuum,
        p_si: bulk.silicon,
        p_sio2: bulk.oxide,
        s_ma_per_m: s.ma,
        s_ms_per_m: s.ms,
        s_sa_per_m: s.sa,
        p_ma: thin_layer_participation(s.ma, layer),
        p_ms: thin_layer_participation(s.ms, layer),
        p_sa: thin_layer_participation(s.sa, layer),
        capacitance_per_length_f_per_m: c_per_len,
        capacitance_total_f: c_total,
        finger_length_m: mode.finger_length_m,
        applied_voltage_v: sol.applied_voltage,
        e_max_gap_v_per_m: sol.max_gap_field(),
        e_mean_gap_v_per_m: sol.mean_gap_field(),
        v_zpf_v: zpf.v_zpf,
        e_zpf_max_v_per_m: zpf.e_zpf_max,
        e_zpf_mean_v_per_m: zpf.e_zpf_mean,
        zpf_capacitance_f: zpf_c,
        zpf_frequency_hz: mode.frequency_hz,
        layer: *layer,
        grid: GridMetadata {
            grid_spacing_m: map.grid_spacing,
            nx: map.nx,
            ny: map.ny,
            relative_residual: sol.relative_residual,
            iterations: sol.iterations,
            fine_sweeps: sol.fine_sweeps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_cross_section, extract_interfaces, GeometrySpec, MaterialLabel, Variant};

    const EPS0: f64 = consts::EPSILON_0;

    fn plates(h: f64, height: usize, layers: &[(MaterialLabel, usize)]) -> RegionMap<f64> {
        RegionMap::parallel_plates(h, height, layers, 11.7, 3.9).unwrap()
    }

    #[test]
    fn parallel_plates_linear_potential_uniform_field() {
        let h = 5e-9;
        let map = plates(h, 44, &[(MaterialLabel::Vacuum, 20)]);
        let sol = solve_potential(&map, 1.0, 1e-10).unwrap();
        let e0 = 1.0 / 100e-9;
        for j in 0..map.ny {
            for i in 2..22 {
                let k = map.index(i, j);
                let x = (i as f64 - 2.0 + 0.5) * h;
                assert!((sol.potential[k] - (0.5 - x / 100e-9)).abs() < 1e-6);
                assert!((sol.field_magnitude(k) / e0 - 1.0).abs() < 1e-3);
            }
        }
        let c = capacitance(&sol);
        assert!((c / (EPS0 * 2.2) - 1.0).abs() < 1e-3, "C/L = {c}");
        assert!(c > 1.94e-11 && c < 1.955e-11);
    }

    #[test]
    fn electrodes_sit_at_half_voltage() {
        let map = plates(10e-9, 8, &[(MaterialLabel::Vacuum, 10)]);
        let sol = solve_potential(&map, 3.0, 1e-9).unwrap();
        for (k, &id) in map.electrode_ids.iter().enumerate() {
            match id {
                ELECTRODE_POSITIVE => assert_eq!(sol.potential[k], 1.5),
                ELECTRODE_NEGATIVE => assert_eq!(sol.potential[k], -1.5),
                _ => {}
            }
        }
    }

    #[test]
    fn two_dielectric_field_ratio_and_series_capacitance() {
        let h = 5e-9;
        let map = plates(h, 20, &[(MaterialLabel::Vacuum, 20), (MaterialLabel::Silicon, 20)]);
        let sol = solve_potential(&map, 1.0, 1e-10).unwrap();
        let e_vac = sol.field_magnitude(map.index(10, 5));
        let e_si = sol.field_magnitude(map.index(30, 5));
        assert!((e_vac / e_si / 11.7 - 1.0).abs() < 1e-3);
        // Cells touching the interface still carry their own side's field.
        let e_vac_edge = sol.field_magnitude(map.index(21, 5));
        let e_si_edge = sol.field_magnitude(map.index(22, 5));
        assert!((e_vac_edge / e_si_edge / 11.7 - 1.0).abs() < 1e-3);
        let height = 20.0 * h;
        let analytic = EPS0 * height / (100e-9 + 100e-9 / 11.7);
        assert!((capacitance(&sol) / analytic - 1.0).abs() < 1e-2);
    }

    #[test]
    fn parallel_plate_sensitivity_matches_hand_integral() {
        let h = 5e-9;
        let map = plates(h, 40, &[(MaterialLabel::Vacuum, 20)]);
        let sol = solve_potential(&map, 1.0, 1e-10).unwrap();
        let ifaces = extract_interfaces(&map);
        assert!(ifaces.ms.is_empty() && ifaces.sa.is_empty());
        let s = surface_sensitivity(&sol, &ifaces);
        let e = 1.0 / 100e-9;
        let expected = EPS0 * e * e * (2.0 * 40.0 * h) / (2.0 * sol.total_energy_per_length);
        assert!((s.ma / expected - 1.0).abs() < 1e-2);
        assert_eq!(s.ms, 0.0);
        assert_eq!(s.sa, 0.0);
    }

    #[test]
    fn all_vacuum_partition_is_pure_vacuum() {
        let map = plates(10e-9, 10, &[(MaterialLabel::Vacuum, 10)]);
        let sol = solve_potential(&map, 1.0, 1e-9).unwrap();
        let p = participation(&sol, &map);
        assert_eq!(p.vacuum, 1.0);
        assert_eq!(p.silicon + p.oxide, 0.0);
    }

    fn small_spec(variant: Variant) -> GeometrySpec<f64> {
        let mut s = GeometrySpec::new(variant, 400e-9, 100e-9);
        s.n_finger_pairs = 1;
        s.handle_depth = 400e-9;
        s.oxide_thickness = 400e-9;
        s
    }

    #[test]
    fn voltage_invariance_and_partition() {
        let map = build_cross_section(&small_spec(Variant::BulkSubstrate), 10e-9).unwrap();
        let ifaces = extract_interfaces(&map);
        let a = solve_potential(&map, 1.0, 1e-9).unwrap();
        let b = solve_potential(&map, 2.0, 1e-9).unwrap();
        let (pa, pb) = (participation(&a, &map), participation(&b, &map));
        assert!((pa.vacuum + pa.silicon + pa.oxide - 1.0).abs() < 1e-6);
        assert!((pa.vacuum - pb.vacuum).abs() < 1e-7);
        assert!((capacitance(&a) / capacitance(&b) - 1.0).abs() < 1e-7);
        let (sa, sb) = (surface_sensitivity(&a, &ifaces), surface_sensitivity(&b, &ifaces));
        assert!((sa.ma / sb.ma - 1.0).abs() < 1e-7);
        assert!((sa.sa / sb.sa - 1.0).abs() < 1e-7);
        assert!(a.total_energy_per_length > 0.0);
    }

    #[test]
    fn energy_density_matches_field() {
        let map = build_cross_section(&small_spec(Variant::TrenchedBeams), 10e-9).unwrap();
        let sol = solve_potential(&map, 1.0, 1e-9).unwrap();
        for (k, &label) in map.cells.iter().enumerate() {
            if label.is_metal() {
                continue;
            }
            let e = sol.field_magnitude(k);
            let u = EPS0 * map.eps_r(label) * e * e / 2.0;
            assert!((sol.energy_density[k] - u).abs() <= 1e-12 * u.max(1e-30));
        }
    }

    #[test]
    fn fringing_raises_capacitance_above_parallel_plate() {
        let spec = small_spec(Variant::VacuumGap);
        let map = build_cross_section(&spec, 10e-9).unwrap();
        let sol = solve_potential(&map, 1.0, 1e-9).unwrap();
        // Facing height of one gap: beam plus top metal.
        let facing = spec.membrane_thickness + spec.metal_thickness;
        let gaps = (2 * spec.n_finger_pairs - 1) as f64;
        assert!(capacitance(&sol) > gaps * EPS0 * facing / spec.gap_width);
    }

    #[test]
    fn thin_layer_is_linear_in_sensitivity() {
        let layer = ThinLayerSpec::<f64>::default();
        assert_eq!(thin_layer_participation(0.0, &layer), 0.0);
        assert!((thin_layer_participation(1e6, &layer) - 0.03).abs() < 1e-12);
        assert!(ThinLayerSpec { thickness_m: 0.0, eps_layer: 10.0 }.validate().is_err());
        assert!(ThinLayerSpec { thickness_m: 1e-9, eps_layer: 0.5 }.validate().is_err());
    }

    #[test]
    fn zero_point_field_scales_with_inverse_root_capacitance() {
        let map = plates(5e-9, 20, &[(MaterialLabel::Vacuum, 20)]);
        let sol = solve_potential(&map, 1.0, 1e-10).unwrap();
        let a = zero_point_field(&sol, 42e-15, 5.94e9).unwrap();
        let b = zero_point_field(&sol, 84e-15, 5.94e9).unwrap();
        assert!((b.e_zpf_max / a.e_zpf_max - 0.5f64.sqrt()).abs() < 1e-12);
        let v = (consts::HBAR * 2.0 * std::f64::consts::PI * 5.94e9 / (2.0 * 42e-15)).sqrt();
        assert!((a.v_zpf / v - 1.0).abs() < 1e-12);
        // Uniform gap field: V_zpf / gap.
        assert!((a.e_zpf_mean / (v / 100e-9) - 1.0).abs() < 1e-3);
        assert!(zero_point_field(&sol, 0.0, 1e9).is_err());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let map = plates(10e-9, 4, &[(MaterialLabel::Vacuum, 10)]);
        assert!(matches!(solve_potential(&map, 1.0, 1e-3), Err(SolverError::InvalidInput(_))));
        assert!(matches!(solve_potential(&map, 1.0, 0.0), Err(SolverError::InvalidInput(_))));
    }

    #[test]
    fn single_precision_solve() {
        let map = RegionMap::<f32>::parallel_plates(5e-9, 20, &[(MaterialLabel::Vacuum, 20)], 11.7, 3.9).unwrap();
        let sol = solve_potential(&map, 1.0f32, 1e-5).unwrap();
        let c = capacitance(&sol) as f64;
        assert!((c / (EPS0 * 1.0) - 1.0).abs() < 1e-3, "{c}");
    }

    #[test]
    fn dump_round_trip() {
        let map = plates(10e-9, 6, &[(MaterialLabel::Vacuum, 10)]);
        let sol = solve_potential(&map, 1.0, 1e-9).unwrap();
        let mut buf = Vec::new();
        write_field_dump(&sol, DumpQuantity::Potential, &mut buf).unwrap();
        assert_eq!(buf.len(), 48 + 8 * map.nx * map.ny);
        let d = read_field_dump(buf.as_slice()).unwrap();
        assert_eq!((d.nx, d.ny, d.quantity), (map.nx, map.ny, DumpQuantity::Potential));
        assert_eq!(d.values, sol.potential);
        assert_eq!(d.grid_spacing, 10e-9);
        buf[0] = b'X';
        assert!(read_field_dump(buf.as_slice()).is_err());
    }
}
