//! `CSQ1` binary matrix files: the 4-byte magic, then one or more records of
//! 60x17 little-endian `i16` cells in row-major order.

use super::{CadError, QuantizedMatrix, N_COLS, N_ROWS};

pub const BINARY_MAGIC: &[u8; 4] = b"CSQ1";
const RECORD_BYTES: usize = N_ROWS * N_COLS * 2;

pub fn write_records(records: &[QuantizedMatrix]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + records.len() * RECORD_BYTES);
    out.extend_from_slice(BINARY_MAGIC);
    for m in records {
        for row in m.rows() {
            for &v in row {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

pub fn read_records(bytes: &[u8]) -> Result<Vec<QuantizedMatrix>, CadError> {
    let syntax = |s: &str| CadError::Syntax(s.to_string());
    let body = bytes.strip_prefix(BINARY_MAGIC.as_slice()).ok_or_else(|| syntax("missing CSQ1 magic"))?;
    if body.len() % RECORD_BYTES != 0 {
        return Err(syntax("truncated record"));
    }
    Ok(body
        .chunks_exact(RECORD_BYTES)
        .map(|rec| {
            let mut cells = [[0i16; N_COLS]; N_ROWS];
            for (i, pair) in rec.chunks_exact(2).enumerate() {
                cells[i / N_COLS][i % N_COLS] = i16::from_le_bytes([pair[0], pair[1]]);
            }
            QuantizedMatrix::from_cells(cells)
        })
        .collect())
}
