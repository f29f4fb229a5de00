use std::path::Path;

use crate::{Error, Result};

/// Rows of 32-bit floats read from an embedding sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub rows: usize,
    pub dim: usize,
    pub data: Vec<f32>,
}

impl EmbeddingTable {
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Layout: little-endian `u64` row count, then `rows * dim` little-endian
/// `f32` values. The dimension is implied by the file length.
pub fn read_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: msg,
    };
    let header: [u8; 8] = bytes
        .get(..8)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| bad("shorter than the 8-byte header".into()))?;
    let rows = u64::from_le_bytes(header) as usize;
    let body = &bytes[8..];
    if body.len() % 4 != 0 {
        return Err(bad(format!("payload of {} bytes is not a whole number of f32", body.len())));
    }
    let floats = body.len() / 4;
    let dim = match rows {
        0 if floats == 0 => 0,
        0 => return Err(bad("zero rows but non-empty payload".into())),
        r if floats % r == 0 => floats / r,
        r => return Err(bad(format!("{floats} floats do not split into {r} rows"))),
    };
    let data = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(EmbeddingTable { rows, dim, data })
}

pub fn write_embeddings(path: &Path, rows: &[Vec<f32>]) -> Result<()> {
    let dim = rows.first().map_or(0, Vec::len);
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: r.len(),
        });
    }
    let mut bytes = Vec::with_capacity(8 + 4 * dim * rows.len());
    bytes.extend_from_slice(&(rows.len() as u64).to_le_bytes());
    for v in rows.iter().flatten() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
