//! Rasterized 2D cross-sections of interdigitated finger capacitors.
//!
//! The cross-section is taken perpendicular to the fingers. The grid is
//! cell-centred: cell `(i, j)` covers `[i h, (i + 1) h) x [j h, (j + 1) h)` with
//! `j` counting upward from the bottom of the domain. Every length in a
//! [`GeometrySpec`] is rounded to a whole number of cells, so material
//! boundaries always fall on cell faces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid geometry: {0}")]
    InvalidSpec(String),
    #[error("grid too coarse: gap resolved with {cells:.2} cells, need at least 10")]
    GridTooCoarse { cells: f64 },
    #[error("invalid region map: {0}")]
    InvalidMap(String),
}

/// The four capacitor cross-sections compared in the design study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Fingers on a bulk silicon substrate that fills the lower half-space.
    BulkSubstrate,
    /// Fingers on a suspended silicon device-layer membrane.
    Membrane,
    /// Membrane etched into beams under the fingers; buried oxide still in place.
    TrenchedBeams,
    /// Released beams with metalized sidewalls: the vacuum-gap capacitor.
    VacuumGap,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::BulkSubstrate, Variant::Membrane, Variant::TrenchedBeams, Variant::VacuumGap];

    pub fn name(self) -> &'static str {
        match self {
            Variant::BulkSubstrate => "bulk_substrate",
            Variant::Membrane => "membrane",
            Variant::TrenchedBeams => "trenched_beams",
            Variant::VacuumGap => "vacuum_gap",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bulk_substrate" | "bulk" | "a" => Ok(Variant::BulkSubstrate),
            "membrane" | "b" => Ok(Variant::Membrane),
            "trenched_beams" | "trenched" | "c" => Ok(Variant::TrenchedBeams),
            "vacuum_gap" | "vacuum" | "d" => Ok(Variant::VacuumGap),
            other => Err(GeometryError::InvalidSpec(format!("unknown variant '{other}'"))),
        }
    }
}

/// Parametric description of a finger-capacitor cross-section. Lengths in metres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec<T> {
    pub variant: Variant,
    /// Width of one finger. For [`Variant::VacuumGap`] this includes the sidewall metal.
    pub finger_width: T,
    /// Vacuum (or dielectric) spacing between facing metal surfaces of adjacent fingers.
    pub gap_width: T,
    pub n_finger_pairs: usize,
    pub membrane_thickness: T,
    pub metal_thickness: T,
    pub oxide_thickness: T,
    pub handle_depth: T,
    /// Margin added on every open side, in units of the finger pitch.
    pub padding_factor: T,
    pub eps_si: T,
    pub eps_sio2: T,
}

impl<T: Real> GeometrySpec<T> {
    /// Spec with the device-stack defaults: 220 nm device layer, 80 nm aluminium,
    /// 3 um buried oxide, 1 um of handle wafer, three finger pairs.
    pub fn new(variant: Variant, finger_width: T, gap_width: T) -> Self {
        Self {
            variant,
            finger_width,
            gap_width,
            n_finger_pairs: 3,
            membrane_thickness: T::lit(220e-9),
            metal_thickness: T::lit(80e-9),
            oxide_thickness: T::lit(3e-6),
            handle_depth: T::lit(1e-6),
            padding_factor: T::lit(3.0),
            eps_si: T::lit(11.7),
            eps_sio2: T::lit(3.9),
        }
    }

    pub fn pitch(&self) -> T {
        self.finger_width + self.gap_width
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let lengths = [
            ("finger_width", self.finger_width),
            ("gap_width", self.gap_width),
            ("membrane_thickness", self.membrane_thickness),
            ("metal_thickness", self.metal_thickness),
            ("oxide_thickness", self.oxide_thickness),
            ("handle_depth", self.handle_depth),
        ];
        for (name, v) in lengths {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(GeometryError::InvalidSpec(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.n_finger_pairs == 0 {
            return Err(GeometryError::InvalidSpec("n_finger_pairs must be at least 1".into()));
        }
        if !(self.padding_factor >= T::lit(3.0)) {
            return Err(GeometryError::InvalidSpec(format!(
                "padding_factor must be >= 3, got {}",
                self.padding_factor
            )));
        }
        if !(self.eps_si > self.eps_sio2 && self.eps_sio2 > T::one()) {
            return Err(GeometryError::InvalidSpec(format!(
                "permittivities must satisfy eps_si > eps_sio2 > 1, got {} and {}",
                self.eps_si, self.eps_sio2
            )));
        }
        if self.variant == Variant::VacuumGap && !(self.finger_width > T::two() * self.metal_thickness) {
            return Err(GeometryError::InvalidSpec(
                "vacuum-gap fingers must be wider than both sidewall metal layers".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialLabel {
    Vacuum,
    Silicon,
    SiliconDioxide,
    Metal,
}

impl MaterialLabel {
    pub fn is_metal(self) -> bool {
        self == MaterialLabel::Metal
    }

    pub fn is_substrate(self) -> bool {
        matches!(self, MaterialLabel::Silicon | MaterialLabel::SiliconDioxide)
    }
}

/// A bulk material with its relative permittivity. Metal is an equipotential
/// conductor; its `eps_r` is carried as 1 and never used by the solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material<T> {
    pub label: MaterialLabel,
    pub eps_r: T,
}

/// Half-open rectangle of cells, `[i0, i1) x [j0, j1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl CellRect {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.i0 && i < self.i1 && j >= self.j0 && j < self.j1
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.j0..self.j1).flat_map(move |j| (self.i0..self.i1).map(move |i| (i, j)))
    }

    pub fn width(&self) -> usize {
        self.i1 - self.i0
    }
}

pub const ELECTRODE_NONE: u8 = 0;
pub const ELECTRODE_POSITIVE: u8 = 1;
pub const ELECTRODE_NEGATIVE: u8 = 2;

/// Rasterized material map. Cells are stored row-major, `index = j * nx + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMap<T> {
    pub grid_spacing: T,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<MaterialLabel>,
    /// 0 = no conductor, 1 = positive electrode, 2 = negative electrode.
    pub electrode_ids: Vec<u8>,
    pub eps_si: T,
    pub eps_sio2: T,
    /// Vacuum gaps between facing electrodes, used for peak-field statistics.
    pub gap_regions: Vec<CellRect>,
}

impl<T: Real> RegionMap<T> {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn label(&self, i: usize, j: usize) -> MaterialLabel {
        self.cells[self.index(i, j)]
    }

    pub fn eps_r(&self, label: MaterialLabel) -> T {
        match label {
            MaterialLabel::Vacuum | MaterialLabel::Metal => T::one(),
            MaterialLabel::Silicon => self.eps_si,
            MaterialLabel::SiliconDioxide => self.eps_sio2,
        }
    }

    pub fn material(&self, i: usize, j: usize) -> Material<T> {
        let label = self.label(i, j);
        Material { label, eps_r: self.eps_r(label) }
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Checks the electrode bookkeeping: metal cells carry an electrode id and
    /// nothing else does, both polarities exist, and no conductor mixes ids.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = self.nx * self.ny;
        if self.nx == 0 || self.ny == 0 || self.cells.len() != n || self.electrode_ids.len() != n {
            return Err(GeometryError::InvalidMap("array sizes do not match nx * ny".into()));
        }
        if !(self.grid_spacing > T::zero()) {
            return Err(GeometryError::InvalidMap("grid spacing must be positive".into()));
        }
        let mut seen = [false; 3];
        for (k, (&label, &id)) in self.cells.iter().zip(&self.electrode_ids).enumerate() {
            match (label.is_metal(), id) {
                (true, ELECTRODE_POSITIVE | ELECTRODE_NEGATIVE) => seen[id as usize] = true,
                (false, ELECTRODE_NONE) => {}
                _ => {
                    return Err(GeometryError::InvalidMap(format!(
                        "cell {k} has label {label:?} with electrode id {id}"
                    )))
                }
            }
        }
        if !(seen[1] && seen[2]) {
            return Err(GeometryError::InvalidMap("both electrodes must be present".into()));
        }
        // Adjacent metal cells belong to one conductor, so they must share an id.
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = self.index(i, j);
                if !self.cells[k].is_metal() {
                    continue;
                }
                let right = (i + 1 < self.nx).then(|| k + 1);
                let up = (j + 1 < self.ny).then(|| k + self.nx);
                for nb in [right, up].into_iter().flatten() {
                    if self.cells[nb].is_metal() && self.electrode_ids[nb] != self.electrode_ids[k] {
                        return Err(GeometryError::InvalidMap(format!("electrodes touch at cells {k} and {nb}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of 4-connected metal components.
    pub fn conductor_count(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if seen[start] || !self.cells[start].is_metal() {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(k) = stack.pop() {
                let (i, j) = (k % self.nx, k / self.nx);
                let mut push = |nb: usize| {
                    if !seen[nb] && self.cells[nb].is_metal() {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                };
                if i > 0 {
                    push(k - 1);
                }
                if i + 1 < self.nx {
                    push(k + 1);
                }
                if j > 0 {
                    push(k - self.nx);
                }
                if j + 1 < self.ny {
                    push(k + self.nx);
                }
            }
        }
        count
    }

    /// Two plate electrodes facing each other across `layers`, stacked along x.
    ///
    /// The plates span the full domain height and the top and bottom
    /// boundaries are insulating, so the field between the plates is exactly
    /// one-dimensional. `plate_height_cells` sets the facing length. Layers are
    /// `(material, thickness in cells)` from the positive plate outward.
    pub fn parallel_plates(
        grid_spacing: T,
        plate_height_cells: usize,
        layers: &[(MaterialLabel, usize)],
        eps_si: T,
        eps_sio2: T,
    ) -> Result<Self, GeometryError> {
        const PLATE: usize = 2;
        if layers.iter().any(|&(m, _)| m.is_metal()) || layers.is_empty() || plate_height_cells == 0 {
            return Err(GeometryError::InvalidSpec("parallel plates need non-metal layers and a height".into()));
        }
        let gap: usize = layers.iter().map(|&(_, n)| n).sum();
        let nx = 2 * PLATE + gap;
        let ny = plate_height_cells;
        let mut cells = vec![MaterialLabel::Vacuum; nx * ny];
        let mut ids = vec![ELECTRODE_NONE; nx * ny];
        for j in 0..ny {
            for i in 0..PLATE {
                cells[j * nx + i] = MaterialLabel::Metal;
                ids[j * nx + i] = ELECTRODE_POSITIVE;
                cells[j * nx + nx - 1 - i] = MaterialLabel::Metal;
                ids[j * nx + nx - 1 - i] = ELECTRODE_NEGATIVE;
            }
            let mut i = PLATE;
            for &(m, n) in layers {
                for _ in 0..n {
                    cells[j * nx + i] = m;
                    i += 1;
                }
            }
        }
        let map = Self {
            grid_spacing,
            nx,
            ny,
            cells,
            electrode_ids: ids,
            eps_si,
            eps_sio2,
            gap_regions: vec![CellRect { i0: PLATE, i1: PLATE + gap, j0: 0, j1: ny }],
        };
        map.validate()?;
        Ok(map)
    }
}

fn cells_for<T: Real>(length: T, h: T) -> usize {
    let n = (length / h).round().to_usize().unwrap_or(0);
    n.max(1)
}

/// Rasterizes the requested capacitor variant.
///
/// Fingers alternate polarity starting with the positive electrode on the
/// left. Every open side of the stack gets `padding_factor` finger pitches of
/// margin; below a released membrane the buried-oxide cavity is followed by
/// `handle_depth` of handle silicon.
pub fn build_cross_section<T: Real>(spec: &GeometrySpec<T>, grid_spacing: T) -> Result<RegionMap<T>, GeometryError> {
    spec.validate()?;
    if !(grid_spacing > T::zero()) || !grid_spacing.is_finite() {
        return Err(GeometryError::InvalidSpec(format!("grid spacing must be positive, got {grid_spacing}")));
    }
    let gap_resolution = (spec.gap_width / grid_spacing).to_f64_lossy();
    // Allow for rounding in values such as gap / 10 computed in floating point.
    if gap_resolution < 10.0 - 1e-6 {
        return Err(GeometryError::GridTooCoarse { cells: gap_resolution });
    }
    let h = grid_spacing;
    let w = cells_for(spec.finger_width, h);
    let g = cells_for(spec.gap_width, h);
    let tm = cells_for(spec.metal_thickness, h);
    let tmem = cells_for(spec.membrane_thickness, h);
    let tox = cells_for(spec.oxide_thickness, h);
    let handle = cells_for(spec.handle_depth, h);
    let pad = (spec.padding_factor * spec.pitch() / h).ceil().to_usize().unwrap_or(0).max(1);
    if spec.variant == Variant::VacuumGap && w <= 2 * tm {
        return Err(GeometryError::InvalidSpec("sidewall metal fills the whole beam at this resolution".into()));
    }

    let n_fingers = 2 * spec.n_finger_pairs;
    let array_width = n_fingers * w + (n_fingers - 1) * g;
    let nx = 2 * pad + array_width;

    // Vertical layout: (bottom of device layer, bottom of metal, top of metal).
    let (beam_base, metal_base, ny) = match spec.variant {
        Variant::BulkSubstrate => (pad, pad, pad + tm + pad),
        Variant::Membrane | Variant::TrenchedBeams | Variant::VacuumGap => {
            let base = handle + tox;
            (base, base + tmem, base + tmem + tm + pad)
        }
    };
    let metal_top = metal_base + tm;

    let mut cells = vec![MaterialLabel::Vacuum; nx * ny];
    let mut ids = vec![ELECTRODE_NONE; nx * ny];
    let mut set = |i: usize, j: usize, m: MaterialLabel, id: u8| {
        cells[j * nx + i] = m;
        ids[j * nx + i] = id;
    };

    // Substrate layers spanning the whole width.
    for j in 0..beam_base {
        for i in 0..nx {
            let m = match spec.variant {
                Variant::BulkSubstrate => MaterialLabel::Silicon,
                Variant::TrenchedBeams if j >= handle => MaterialLabel::SiliconDioxide,
                _ if j < handle => MaterialLabel::Silicon,
                _ => MaterialLabel::Vacuum,
            };
            set(i, j, m, ELECTRODE_NONE);
        }
    }
    if spec.variant == Variant::Membrane {
        for j in beam_base..metal_base {
            for i in 0..nx {
                set(i, j, MaterialLabel::Silicon, ELECTRODE_NONE);
            }
        }
    }

    let finger_start = |k: usize| pad + k * (w + g);
    for k in 0..n_fingers {
        let id = if k % 2 == 0 { ELECTRODE_POSITIVE } else { ELECTRODE_NEGATIVE };
        let x0 = finger_start(k);
        let x1 = x0 + w;
        match spec.variant {
            Variant::BulkSubstrate | Variant::Membrane => {}
            Variant::TrenchedBeams => {
                for j in beam_base..metal_base {
                    for i in x0..x1 {
                        set(i, j, MaterialLabel::Silicon, ELECTRODE_NONE);
                    }
                }
            }
            Variant::VacuumGap => {
                for j in beam_base..metal_base {
                    for i in x0..x1 {
                        let sidewall = i < x0 + tm || i >= x1 - tm;
                        if sidewall {
                            set(i, j, MaterialLabel::Metal, id);
                        } else {
                            set(i, j, MaterialLabel::Silicon, ELECTRODE_NONE);
                        }
                    }
                }
            }
        }
        for j in metal_base..metal_top {
            for i in x0..x1 {
                set(i, j, MaterialLabel::Metal, id);
            }
        }
    }

    let gap_j0 = if spec.variant == Variant::VacuumGap { beam_base } else { metal_base };
    let gap_regions = (0..n_fingers - 1)
        .map(|k| CellRect { i0: finger_start(k) + w, i1: finger_start(k + 1), j0: gap_j0, j1: metal_top })
        .collect();

    let map = RegionMap {
        grid_spacing,
        nx,
        ny,
        cells,
        electrode_ids: ids,
        eps_si: spec.eps_si,
        eps_sio2: spec.eps_sio2,
        gap_regions,
    };
    map.validate()?;
    Ok(map)
}

/// The three parasitic-layer interface classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InterfaceClass {
    /// Metal to vacuum.
    MA,
    /// Metal to substrate (silicon or oxide).
    MS,
    /// Substrate to vacuum.
    SA,
}

/// One cell face lying on an interface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSegment<T> {
    pub midpoint: [T; 2],
    /// Unit normal pointing away from the metal (MA, MS) or away from the substrate (SA).
    pub normal: [T; 2],
    pub length: T,
    /// Cell on the side the normal points into; field samples are taken there.
    pub sample_cell: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSet<T> {
    pub ma: Vec<InterfaceSegment<T>>,
    pub ms: Vec<InterfaceSegment<T>>,
    pub sa: Vec<InterfaceSegment<T>>,
}

impl<T: Real> InterfaceSet<T> {
    pub fn class(&self, class: InterfaceClass) -> &[InterfaceSegment<T>] {
        match class {
            InterfaceClass::MA => &self.ma,
            InterfaceClass::MS => &self.ms,
            InterfaceClass::SA => &self.sa,
        }
    }

    pub fn total_length(&self, class: InterfaceClass) -> T {
        self.class(class).iter().map(|s| s.length).sum()
    }
}

/// Orders the pair so that the first cell is the "inner" side (metal for MA
/// and MS, substrate for SA) and returns the class.
fn classify(a: MaterialLabel, b: MaterialLabel) -> Option<(InterfaceClass, bool)> {
    use MaterialLabel::*;
    match (a, b) {
        (Metal, Vacuum) => Some((InterfaceClass::MA, false)),
        (Vacuum, Metal) => Some((InterfaceClass::MA, true)),
        (Metal, Silicon | SiliconDioxide) => Some((InterfaceClass::MS, false)),
        (Silicon | SiliconDioxide, Metal) => Some((InterfaceClass::MS, true)),
        (Silicon | SiliconDioxide, Vacuum) => Some((InterfaceClass::SA, false)),
        (Vacuum, Silicon | SiliconDioxide) => Some((InterfaceClass::SA, true)),
        _ => None,
    }
}

/// Collects every cell face separating two interface-forming materials.
pub fn extract_interfaces<T: Real>(map: &RegionMap<T>) -> InterfaceSet<T> {
    let h = map.grid_spacing;
    let half = T::half();
    let mut set = InterfaceSet { ma: Vec::new(), ms: Vec::new(), sa: Vec::new() };
    let mut push = |class: InterfaceClass, seg: InterfaceSegment<T>| match class {
        InterfaceClass::MA => set.ma.push(seg),
        InterfaceClass::MS => set.ms.push(seg),
        InterfaceClass::SA => set.sa.push(seg),
    };
    for j in 0..map.ny {
        for i in 0..map.nx {
            let k = map.index(i, j);
            let here = map.cells[k];
            // Face to the right: normal along +x when `here` is the inner side.
            if i + 1 < map.nx {
                let nb = k + 1;
                if let Some((class, swapped)) = classify(here, map.cells[nb]) {
                    let sign = if swapped { -T::one() } else { T::one() };
                    push(
                        class,
                        InterfaceSegment {
                            midpoint: [T::from_usize_lossy(i + 1) * h, (T::from_usize_lossy(j) + half) * h],
                            normal: [sign, T::zero()],
                            length: h,
                            sample_cell: if swapped { k } else { nb },
                        },
                    );
                }
            }
            if j + 1 < map.ny {
                let nb = k + map.nx;
                if let Some((class, swapped)) = classify(here, map.cells[nb]) {
                    let sign = if swapped { -T::one() } else { T::one() };
                    push(
                        class,
                        InterfaceSegment {
                            midpoint: [(T::from_usize_lossy(i) + half) * h, T::from_usize_lossy(j + 1) * h],
                            normal: [T::zero(), sign],
                            length: h,
                            sample_cell: if swapped { k } else { nb },
                        },
                    );
                }
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(variant: Variant, gap: f64) -> GeometrySpec<f64> {
        let mut s = GeometrySpec::new(variant, 1e-6, gap);
        s.n_finger_pairs = 1;
        s
    }

    fn count(map: &RegionMap<f64>, label: MaterialLabel) -> usize {
        map.cells.iter().filter(|&&c| c == label).count()
    }

    #[test]
    fn vacuum_gap_has_sidewall_metal_and_no_oxide() {
        let map = build_cross_section(&spec(Variant::VacuumGap, 100e-9), 10e-9).unwrap();
        assert_eq!(count(&map, MaterialLabel::SiliconDioxide), 0);
        let gap = map.gap_regions[0];
        // Cells flanking the gap are metal over the full beam + metal height.
        for j in gap.j0..gap.j1 {
            assert_eq!(map.label(gap.i0 - 1, j), MaterialLabel::Metal);
            assert_eq!(map.label(gap.i1, j), MaterialLabel::Metal);
            for i in gap.i0..gap.i1 {
                assert_eq!(map.label(i, j), MaterialLabel::Vacuum);
            }
        }
        // Beam core is silicon, directly under the top metal.
        let mid = (gap.i0 - 50, gap.j0 + 5);
        assert_eq!(map.label(mid.0, mid.1), MaterialLabel::Silicon);
        assert_eq!(map.conductor_count(), 2);
    }

    #[test]
    fn bulk_substrate_fills_lower_half_space() {
        let map = build_cross_section(&spec(Variant::BulkSubstrate, 100e-9), 10e-9).unwrap();
        let gap = map.gap_regions[0];
        for j in 0..gap.j0 {
            for i in 0..map.nx {
                assert_eq!(map.label(i, j), MaterialLabel::Silicon);
            }
        }
        assert_eq!(count(&map, MaterialLabel::SiliconDioxide), 0);
    }

    #[test]
    fn trenched_beams_keep_oxide_and_open_trenches() {
        let map = build_cross_section(&spec(Variant::TrenchedBeams, 100e-9), 10e-9).unwrap();
        assert!(count(&map, MaterialLabel::SiliconDioxide) > 0);
        let gap = map.gap_regions[0];
        // Trench under the metal gap is open down to the oxide.
        let i = (gap.i0 + gap.i1) / 2;
        assert_eq!(map.label(i, gap.j0 - 1), MaterialLabel::Vacuum);
    }

    #[test]
    fn fingers_alternate_polarity() {
        let mut s = spec(Variant::Membrane, 100e-9);
        s.n_finger_pairs = 3;
        let map = build_cross_section(&s, 10e-9).unwrap();
        assert_eq!(map.conductor_count(), 6);
        let j = map.gap_regions[0].j0;
        let ids: Vec<u8> = map.gap_regions.iter().map(|g| map.electrode_ids[map.index(g.i0 - 1, j)]).collect();
        assert_eq!(ids, vec![1, 2, 1, 2, 1]);
    }

    #[test]
    fn zero_gap_is_invalid() {
        let err = build_cross_section(&spec(Variant::VacuumGap, 0.0), 10e-9).unwrap_err();
        assert!(matches!(err, GeometryError::InvalidSpec(_)));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let err = build_cross_section(&spec(Variant::VacuumGap, 100e-9), 20e-9).unwrap_err();
        assert!(matches!(err, GeometryError::GridTooCoarse { .. }));
        // gap / 10 exactly is accepted even though 100e-9 / 10 is not exact in binary.
        assert!(build_cross_section(&spec(Variant::VacuumGap, 100e-9), 100e-9 / 10.0).is_ok());
    }

    #[test]
    fn spec_validation_catches_bad_values() {
        let mut s = spec(Variant::VacuumGap, 100e-9);
        s.padding_factor = 2.0;
        assert!(s.validate().is_err());
        let mut s = spec(Variant::VacuumGap, 100e-9);
        s.eps_sio2 = 12.0;
        assert!(s.validate().is_err());
        let mut s = spec(Variant::VacuumGap, 100e-9);
        s.n_finger_pairs = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn parallel_plate_map_has_only_metal_air_interfaces() {
        let map = RegionMap::parallel_plates(5e-9, 44, &[(MaterialLabel::Vacuum, 20)], 11.7, 3.9).unwrap();
        let ifaces = extract_interfaces(&map);
        assert!(ifaces.ms.is_empty() && ifaces.sa.is_empty());
        assert_eq!(ifaces.ma.len(), 2 * 44);
        for seg in &ifaces.ma {
            assert!(!map.cells[seg.sample_cell].is_metal());
        }
    }

    #[test]
    fn bulk_substrate_has_all_three_interface_classes() {
        let map = build_cross_section(&spec(Variant::BulkSubstrate, 100e-9), 10e-9).unwrap();
        let ifaces = extract_interfaces(&map);
        assert!(!ifaces.ma.is_empty() && !ifaces.ms.is_empty() && !ifaces.sa.is_empty());
    }

    #[test]
    fn normals_point_into_the_sample_cell() {
        let map = build_cross_section(&spec(Variant::VacuumGap, 100e-9), 10e-9).unwrap();
        let h = map.grid_spacing;
        let ifaces = extract_interfaces(&map);
        for seg in ifaces.ma.iter().chain(&ifaces.ms).chain(&ifaces.sa) {
            let (i, j) = (seg.sample_cell % map.nx, seg.sample_cell / map.nx);
            let cx = (i as f64 + 0.5) * h;
            let cy = (j as f64 + 0.5) * h;
            let d = [cx - seg.midpoint[0], cy - seg.midpoint[1]];
            let along = d[0] * seg.normal[0] + d[1] * seg.normal[1];
            assert!((along - 0.5 * h).abs() < 1e-12 * h.max(1.0));
        }
    }
}
