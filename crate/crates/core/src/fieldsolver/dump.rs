//! Raw binary grid dumps.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `GSFIELD1` |
//! | 8     | `nx` (u64) |
//! | 8     | `ny` (u64) |
//! | 8     | grid spacing in metres (f64) |
//! | 8     | applied voltage in volts (f64) |
//! | 4     | quantity code (u32): 0 potential, 1 \|E\|, 2 energy density |
//! | 4     | reserved, zero |
//! | 8 nx ny | row-major f64 values, `index = j * nx + i` |

use std::io::{self, Read, Write};

use super::FieldSolution;
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"GSFIELD1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DumpQuantity {
    Potential = 0,
    FieldMagnitude = 1,
    EnergyDensity = 2,
}

impl DumpQuantity {
    fn from_code(code: u32) -> io::Result<Self> {
        match code {
            0 => Ok(Self::Potential),
            1 => Ok(Self::FieldMagnitude),
            2 => Ok(Self::EnergyDensity),
            c => Err(io::Error::new(io::ErrorKind::InvalidData, format!("unknown quantity code {c}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub grid_spacing: f64,
    pub applied_voltage: f64,
    pub quantity: DumpQuantity,
    pub values: Vec<f64>,
}

pub fn write_field_dump<T: Real, W: Write>(
    sol: &FieldSolution<T>,
    quantity: DumpQuantity,
    mut out: W,
) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(sol.nx as u64).to_le_bytes())?;
    out.write_all(&(sol.ny as u64).to_le_bytes())?;
    out.write_all(&sol.grid_spacing.to_f64_lossy().to_le_bytes())?;
    out.write_all(&sol.applied_voltage.to_f64_lossy().to_le_bytes())?;
    out.write_all(&(quantity as u32).to_le_bytes())?;
    out.write_all(&0u32.to_le_bytes())?;
    let n = sol.nx * sol.ny;
    for k in 0..n {
        let v = match quantity {
            DumpQuantity::Potential => sol.potential[k],
            DumpQuantity::FieldMagnitude => sol.field_magnitude(k),
            DumpQuantity::EnergyDensity => sol.energy_density[k],
        };
        out.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_field_dump<R: Read>(mut input: R) -> io::Result<FieldDump> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "not a field dump"));
    }
    let nx = read_u64(&mut input)? as usize;
    let ny = read_u64(&mut input)? as usize;
    let grid_spacing = read_f64(&mut input)?;
    let applied_voltage = read_f64(&mut input)?;
    let quantity = DumpQuantity::from_code(read_u32(&mut input)?)?;
    let _reserved = read_u32(&mut input)?;
    let n = nx.checked_mul(ny).ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "grid dimensions overflow"))?;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(read_f64(&mut input)?);
    }
    Ok(FieldDump { nx, ny, grid_spacing, applied_voltage, quantity, values })
}
