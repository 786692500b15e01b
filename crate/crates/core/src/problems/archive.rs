//! Problem archives and a plain-text matrix format.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! offset  size        field
//! 0       8           magic "DRSPLIT1"
//! 8       4           u32 format version (= 1)
//! 12      8           u64 metadata length L
//! 20      L           UTF-8 JSON {"name", "seed", "params"}
//! 20+L    4           u32 block count
//! then per block:
//!         4           u32 name length N
//!         N           UTF-8 block name
//!         8           u64 rows
//!         8           u64 cols
//!         8·rows·cols f64 entries, row-major
//! ```
//!
//! The text format is a header line `rows cols` followed by one line per row
//! of whitespace-separated numbers; lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

use super::ProblemInstance;

pub const MAGIC: &[u8; 8] = b"DRSPLIT1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMeta {
    pub name: String,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub meta: ArchiveMeta,
    pub blocks: Vec<(String, DenseMatrix<f64>)>,
}

impl Archive {
    pub fn from_instance<T: Real>(p: &ProblemInstance<T>) -> Self {
        Self {
            meta: ArchiveMeta { name: p.name.clone(), seed: p.seed, params: p.params.clone() },
            blocks: p
                .blocks
                .iter()
                .map(|(n, m)| (n.clone(), DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].to_f64_lossy())))
                .collect(),
        }
    }

    pub fn block(&self, name: &str) -> Option<&DenseMatrix<f64>> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let meta = serde_json::to_vec(&self.meta).map_err(|e| Error::Archive(e.to_string()))?;
        let mut buf = Vec::with_capacity(64 + meta.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(meta.len() as u64).to_le_bytes());
        buf.extend_from_slice(&meta);
        buf.extend_from_slice(&(self.blocks.len() as u32).to_le_bytes());
        for (name, m) in &self.blocks {
            buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
            buf.extend_from_slice(name.as_bytes());
            buf.extend_from_slice(&(m.rows() as u64).to_le_bytes());
            buf.extend_from_slice(&(m.cols() as u64).to_le_bytes());
            for x in m.as_slice() {
                buf.extend_from_slice(&x.to_le_bytes());
            }
        }
        w.write_all(&buf).map_err(io_err)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(io_err)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(8)? != MAGIC {
            return Err(Error::Archive("bad magic".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(Error::Archive(format!("unsupported version {version}")));
        }
        let meta_len = cur.len_u64()?;
        let meta: ArchiveMeta =
            serde_json::from_slice(cur.take(meta_len)?).map_err(|e| Error::Archive(format!("metadata: {e}")))?;
        let count = cur.u32()? as usize;
        let mut blocks = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let name_len = cur.u32()? as usize;
            let name = std::str::from_utf8(cur.take(name_len)?)
                .map_err(|e| Error::Archive(format!("block name: {e}")))?
                .to_string();
            let rows = cur.len_u64()?;
            let cols = cur.len_u64()?;
            let n = rows.checked_mul(cols).ok_or_else(|| Error::Archive("block size overflow".into()))?;
            let raw = cur.take(n.checked_mul(8).ok_or_else(|| Error::Archive("block size overflow".into()))?)?;
            let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
            blocks.push((name, DenseMatrix::from_row_major(rows, cols, data)?));
        }
        if cur.pos != bytes.len() {
            return Err(Error::Archive(format!("{} trailing bytes", bytes.len() - cur.pos)));
        }
        Ok(Self { meta, blocks })
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Archive(e.to_string())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Archive(format!("truncated at byte {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn len_u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| Error::Archive(format!("length {v} does not fit in memory")))
    }
}

/// Writes `m` in the text format with round-trip precision.
pub fn write_matrix_text(m: &DenseMatrix<f64>, mut w: impl Write) -> Result<()> {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:e}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    w.write_all(s.as_bytes()).map_err(io_err)
}

pub fn read_matrix_text(text: &str) -> Result<DenseMatrix<f64>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Archive("missing header".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| Error::Archive(format!("bad header `{header}`"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Archive(format!("header needs `rows cols`, got `{header}`")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(tok.parse::<f64>().map_err(|_| Error::Archive(format!("row {i}: bad number `{tok}`")))?);
        }
        if data.len() - before != cols {
            return Err(Error::Archive(format!("row {i} has {} entries, expected {cols}", data.len() - before)));
        }
    }
    DenseMatrix::from_row_major(rows, cols, data)
}
