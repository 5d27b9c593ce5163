//! The binary field container.
//!
//! Little-endian throughout:
//!
//! | field          | type          |
//! |----------------|---------------|
//! | magic          | `b"GFFS"`     |
//! | version        | u32 (1)       |
//! | nu             | u32           |
//! | p              | u32           |
//! | seed           | u64           |
//! | replica count  | u64           |
//! | level count    | u32           |
//! | per level      | u64 center count, f64 radius |
//!
//! followed by `replica count` rows of f64 values. The row length is the
//! remaining byte count divided by `8 * replica count`; the sidecar JSON says
//! which (level, cell, radius) each column holds.

use std::io::{Read, Write};

use crate::error::{GffError, Result};

pub const MAGIC: [u8; 4] = *b"GFFS";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelEntry {
    pub centers: u64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainerHeader {
    pub nu: u32,
    pub p: u32,
    pub seed: u64,
    pub replicas: u64,
    pub levels: Vec<LevelEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldContainer {
    pub header: ContainerHeader,
    /// Values per replica.
    pub row_len: usize,
    pub values: Vec<f64>,
}

impl FieldContainer {
    pub fn new(header: ContainerHeader, row_len: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() as u64 != header.replicas * row_len as u64 {
            return Err(GffError::Format(format!(
                "{} values do not fill {} rows of {row_len}",
                values.len(),
                header.replicas
            )));
        }
        Ok(Self { header, row_len, values })
    }

    pub fn row(&self, replica: usize) -> &[f64] {
        &self.values[replica * self.row_len..(replica + 1) * self.row_len]
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let h = &self.header;
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&h.nu.to_le_bytes())?;
        w.write_all(&h.p.to_le_bytes())?;
        w.write_all(&h.seed.to_le_bytes())?;
        w.write_all(&h.replicas.to_le_bytes())?;
        w.write_all(&(h.levels.len() as u32).to_le_bytes())?;
        for l in &h.levels {
            w.write_all(&l.centers.to_le_bytes())?;
            w.write_all(&l.radius.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        w.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| GffError::Format(e.to_string()))?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(GffError::Format("bad magic".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(GffError::Format(format!("unsupported version {version}")));
        }
        let nu = cur.u32()?;
        let p = cur.u32()?;
        let seed = cur.u64()?;
        let replicas = cur.u64()?;
        let n_levels = cur.u32()? as usize;
        let mut levels = Vec::with_capacity(n_levels.min(1024));
        for _ in 0..n_levels {
            let centers = cur.u64()?;
            let radius = cur.f64()?;
            levels.push(LevelEntry { centers, radius });
        }
        let rest = &bytes[cur.pos..];
        if !rest.len().is_multiple_of(8) {
            return Err(GffError::Format("value block is not a whole number of f64".into()));
        }
        let n_values = rest.len() / 8;
        let row_len = match replicas {
            0 if n_values == 0 => 0,
            0 => return Err(GffError::Format("values present but replica count is 0".into())),
            r if (n_values as u64).is_multiple_of(r) => (n_values as u64 / r) as usize,
            _ => return Err(GffError::Format("value count is not a multiple of the replica count".into())),
        };
        let values = rest.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Self::new(ContainerHeader { nu, p, seed, replicas, levels }, row_len, values)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| GffError::Format("truncated header".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
