//! Binary checkpoint format.
//!
//! ```text
//! "FADE" | version: u32 LE | { name_len: u64 | name | rows: u64 | cols: u64 | rows·cols f64 }*
//! ```
//! All integers and floats are little-endian; tensors run to end of file.

use std::fs;
use std::path::Path;

use crate::error::{FadeError, Result};
use crate::tensor::Matrix;

pub const MAGIC: &[u8; 4] = b"FADE";
pub const VERSION: u32 = 1;

pub type NamedTensors = Vec<(String, Matrix)>;

pub fn encode(tensors: &[(String, Matrix)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for (name, m) in tensors {
        out.extend_from_slice(&(name.len() as u64).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
        out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
        for v in m.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| FadeError::CorruptCheckpoint(format!("truncated while reading {what}")))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<NamedTensors> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(FadeError::CorruptCheckpoint("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(r.take(4, "version")?.try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(FadeError::CheckpointVersion {
            found: version,
            expected: VERSION,
        });
    }
    let mut tensors = Vec::new();
    while r.pos < bytes.len() {
        let name_len = r.u64("name length")? as usize;
        let name = std::str::from_utf8(r.take(name_len, "name")?)
            .map_err(|_| FadeError::CorruptCheckpoint("tensor name is not UTF-8".into()))?
            .to_owned();
        let rows = r.u64("rows")? as usize;
        let cols = r.u64("cols")? as usize;
        let count = rows
            .checked_mul(cols)
            .and_then(|c| c.checked_mul(8))
            .ok_or_else(|| FadeError::CorruptCheckpoint(format!("absurd shape for {name}")))?;
        let raw = r.take(count, &name)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        tensors.push((name, Matrix::new(rows, cols, data)?));
    }
    Ok(tensors)
}

pub fn save(path: impl AsRef<Path>, tensors: &[(String, Matrix)]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(tensors)).map_err(|e| FadeError::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<NamedTensors> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| FadeError::io(path, e))?;
    decode(&bytes)
}

/// Pops tensors by name, erroring on missing or leftover entries.
pub(crate) struct TensorTable(Vec<(String, Matrix)>);

impl TensorTable {
    pub fn new(tensors: NamedTensors) -> Self {
        TensorTable(tensors)
    }

    pub fn take(&mut self, name: &str) -> Result<Matrix> {
        let pos = self
            .0
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| FadeError::CorruptCheckpoint(format!("missing tensor '{name}'")))?;
        Ok(self.0.remove(pos).1)
    }

    pub fn has(&self, name: &str) -> bool {
        self.0.iter().any(|(n, _)| n == name)
    }

    pub fn finish(self) -> Result<()> {
        match self.0.first() {
            None => Ok(()),
            Some((name, _)) => Err(FadeError::CorruptCheckpoint(format!("unexpected tensor '{name}'"))),
        }
    }
}
