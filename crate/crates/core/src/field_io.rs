//! The `GPF1` binary field dump: magic `GPF1`, little-endian `u32 nx, ny`,
//! `f64 x0, y0, hx, hy`, then `nx * ny` `(re, im)` `f64` pairs, row-major
//! with `y` outer. The domain mask is not stored; it comes from the grid the
//! dump is read against.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};

pub const MAGIC: [u8; 4] = *b"GPF1";
const HEADER_LEN: usize = 4 + 2 * 4 + 4 * 8;

/// Header and node values of a dump, not yet tied to a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub values: Vec<Complex64>,
}

impl FieldDump {
    pub fn from_field(u: &ComplexField) -> Self {
        let g = u.grid();
        FieldDump {
            nx: g.nx,
            ny: g.ny,
            x0: g.x0,
            y0: g.y0,
            hx: g.hx,
            hy: g.hy,
            values: u.values().to_vec(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * self.values.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&(self.nx as u32).to_le_bytes());
        out.extend_from_slice(&(self.ny as u32).to_le_bytes());
        for v in [self.x0, self.y0, self.hx, self.hy] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for z in &self.values {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::FormatVersion(magic));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let (nx, ny) = (u32_at(4), u32_at(8));
        let expected = nx
            .checked_mul(ny)
            .and_then(|n| n.checked_mul(16))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| Error::GridMismatch(format!("implausible dimensions {nx}x{ny}")))?;
        if bytes.len() < expected {
            return Err(Error::Truncated {
                expected,
                found: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(Error::GridMismatch(format!(
                "{} trailing bytes",
                bytes.len() - expected
            )));
        }
        let values = bytes[HEADER_LEN..]
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(FieldDump {
            nx,
            ny,
            x0: f64_at(12),
            y0: f64_at(20),
            hx: f64_at(28),
            hy: f64_at(36),
            values,
        })
    }

    /// Attaches the values to `grid`, which must have the same geometry bit
    /// for bit.
    pub fn into_field(self, grid: &Arc<Grid>) -> Result<ComplexField> {
        let same = self.nx == grid.nx
            && self.ny == grid.ny
            && [self.x0, self.y0, self.hx, self.hy]
                .iter()
                .zip([grid.x0, grid.y0, grid.hx, grid.hy])
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Err(Error::GridMismatch(format!(
                "dump is {}x{} at ({}, {}) step ({}, {})",
                self.nx, self.ny, self.x0, self.y0, self.hx, self.hy
            )));
        }
        ComplexField::from_values(grid.clone(), self.values)
    }
}

pub fn write_field<W: Write>(mut w: W, u: &ComplexField) -> Result<()> {
    w.write_all(&FieldDump::from_field(u).encode())?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R, grid: &Arc<Grid>) -> Result<ComplexField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    FieldDump::decode(&bytes)?.into_field(grid)
}

pub fn save_field(path: &Path, u: &ComplexField) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(f), u)
}

pub fn load_field(path: &Path, grid: &Arc<Grid>) -> Result<ComplexField> {
    read_field(std::fs::File::open(path)?, grid)
}
