//! Binary field snapshots.
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `OBSNAP1\0` |
//! | 4     | u32 format version (1) |
//! | 4     | u32 dim |
//! | 4     | u32 n (points per axis) |
//! | 4     | u32 rank (number of components: 1 scalar, dim vector) |
//! | 8     | f64 box length L |
//! | 8     | f64 dealias fraction |
//! | 8     | f64 time |
//! | 4     | u32 name length in bytes |
//! | var   | UTF-8 name |
//! | 8*N*rank | f64 real-space samples, component-major, each component row-major |
//!
//! Row-major means the last axis varies fastest; sample `(i0, i1, i2)` sits at
//! `x = (i0, i1, i2) * L / n`.

use crate::{GridSpec, SpectralError, SpectralField};
use std::io::{Read, Write};

pub const MAGIC: &[u8; 8] = b"OBSNAP1\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub name: String,
    pub time: f64,
    pub field: SpectralField,
}

pub fn write_snapshot<W: Write>(w: &mut W, name: &str, time: f64, field: &SpectralField) -> Result<(), SpectralError> {
    let g = field.grid;
    w.write_all(MAGIC)?;
    for v in [VERSION, g.dim as u32, g.n as u32, field.ncomp() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in [g.l, g.dealias_fraction, time] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name.as_bytes())?;
    let mut buf = Vec::with_capacity(g.len() * 8);
    for comp in field.to_real() {
        buf.clear();
        for v in comp {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, SpectralError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, SpectralError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(r: &mut R) -> Result<Snapshot, SpectralError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SpectralError::BadSnapshot("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(SpectralError::BadSnapshot(format!("unsupported version {version}")));
    }
    let dim = read_u32(r)? as usize;
    let n = read_u32(r)? as usize;
    let rank = read_u32(r)? as usize;
    let l = read_f64(r)?;
    let frac = read_f64(r)?;
    let time = read_f64(r)?;
    let grid = GridSpec::with_dealias(dim, n, l, frac)?;
    if rank != 1 && rank != dim {
        return Err(SpectralError::BadSnapshot(format!("rank {rank} invalid for dim {dim}")));
    }
    let len = read_u32(r)? as usize;
    let mut name = vec![0u8; len];
    r.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|_| SpectralError::BadSnapshot("name is not UTF-8".into()))?;
    let mut comps = Vec::with_capacity(rank);
    let mut raw = vec![0u8; grid.len() * 8];
    for _ in 0..rank {
        r.read_exact(&mut raw)?;
        comps.push(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect());
    }
    Ok(Snapshot { name, time, field: SpectralField::from_real(grid, &comps) })
}
