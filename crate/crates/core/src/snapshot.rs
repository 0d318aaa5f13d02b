//! Binary field snapshots.
//!
//! Layout (all little-endian): the 5-byte magic `CSDF1`; `n1 n2 n3` as u64;
//! origin and extent as 3+3 f64; then `n1·n2·n3·9` f64 values in node order
//! (x3 fastest), each node's matrix row-major (Lie index outer).

use crate::error::{Error, Result};
use crate::grid::{BoxGrid, CoeffField, Scheme};
use crate::tensor::Mat3;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 5] = b"CSDF1";

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SnapshotHeader {
    pub n: [usize; 3],
    pub origin: [f64; 3],
    pub extent: [f64; 3],
}

pub fn write_field<W: Write>(mut w: W, field: &CoeffField) -> Result<()> {
    w.write_all(MAGIC)?;
    for &n in &field.grid.n {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for v in field.grid.origin.iter().chain(field.grid.extent.iter()) {
        w.write_all(&v.to_le_bytes())?;
    }
    for m in &field.data {
        for z in 0..3 {
            for p in 0..3 {
                w.write_all(&m[(z, p)].to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_header<R: Read>(r: &mut R) -> Result<SnapshotHeader> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)
        .map_err(|e| Error::Format(format!("missing magic: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic (expected CSDF1)".into()));
    }
    let mut n = [0usize; 3];
    for v in &mut n {
        *v = usize::try_from(read_u64(r)?).map_err(|_| Error::Format("node count overflow".into()))?;
    }
    let mut origin = [0.0; 3];
    let mut extent = [0.0; 3];
    for v in origin.iter_mut().chain(extent.iter_mut()) {
        *v = read_f64(r)?;
    }
    Ok(SnapshotHeader { n, origin, extent })
}

/// Reads a field; `scheme = None` picks the highest-order scheme that fits.
pub fn read_field<R: Read>(mut r: R, scheme: Option<Scheme>) -> Result<CoeffField> {
    let hdr = read_header(&mut r)?;
    let grid = match scheme {
        Some(s) => BoxGrid::with_scheme(hdr.origin, hdr.extent, hdr.n, s)?,
        None => BoxGrid::new(hdr.origin, hdr.extent, hdr.n)?,
    };
    let mut buf = vec![0u8; grid.len() * 9 * 8];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated data: {e}")))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    let vals: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::Format(format!("non-finite value at position {i}")));
    }
    let data = vals
        .chunks_exact(9)
        .map(|c| Mat3::from_row_slice(c))
        .collect();
    CoeffField::from_data(grid, data)
}

pub fn save(path: impl AsRef<Path>, field: &CoeffField) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_field(BufWriter::new(f), field)
}

pub fn load(path: impl AsRef<Path>, scheme: Option<Scheme>) -> Result<CoeffField> {
    let f = std::fs::File::open(path)?;
    read_field(BufReader::new(f), scheme)
}

pub fn load_header(path: impl AsRef<Path>) -> Result<SnapshotHeader> {
    let f = std::fs::File::open(path)?;
    read_header(&mut BufReader::new(f))
}

/// CSV with columns `x1,x2,x3,Z,p,value`; `Z` and `p` are 1-based.
pub fn write_csv<W: Write>(mut w: W, field: &CoeffField) -> Result<()> {
    writeln!(w, "x1,x2,x3,Z,p,value")?;
    for (idx, m) in field.data.iter().enumerate() {
        let x = field.grid.position_of(idx);
        for z in 0..3 {
            for p in 0..3 {
                writeln!(w, "{},{},{},{},{},{}", x[0], x[1], x[2], z + 1, p + 1, m[(z, p)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
