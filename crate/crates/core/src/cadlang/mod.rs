//! The sketch-and-extrude command language: domain types, grammar checks,
//! 8-bit parameter quantization, the 60x17 matrix encoding, and the JSON and
//! `CSQ1` binary file formats.

mod binary;
mod command;
mod json;
mod matrix;
mod program;
pub mod quant;

pub use binary::{read_records, write_records, BINARY_MAGIC};
pub use command::{
    BoolOp, Command, CommandKind, Extent, ExtrudeParams, N_SLOTS, SLOT_ARC_SWEEP,
    SLOT_BOOL, SLOT_CCW, SLOT_E1, SLOT_E2, SLOT_EXTENT, SLOT_GAMMA, SLOT_PHI, SLOT_PX, SLOT_PY,
    SLOT_PZ, SLOT_R, SLOT_SCALE, SLOT_THETA, SLOT_X, SLOT_Y, UNUSED,
};
pub use json::{parse_program, program_to_json};
pub use matrix::{from_matrix, to_matrix, QuantizedMatrix, N_COLS, N_ROWS};
pub use program::{CadProgram, Group, LoopSpan, MAX_SEQUENCE_LENGTH};
pub use quant::{dequantize, quantize, ParamKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CadError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("grammar error at command {index}: {reason}")]
    Grammar { index: usize, reason: String },
    #[error("range error: {field} = {value} is outside [0, 255]")]
    Range { field: String, value: i64 },
    #[error("program of length {0} exceeds the {MAX_SEQUENCE_LENGTH}-command capacity")]
    Overflow(usize),
    #[error("decode error at row {row}: {reason}")]
    Decode { row: usize, reason: String },
}

/// Sequence length: number of commands before the terminating EOS,
/// SOL markers included.
pub fn sequence_length(p: &CadProgram) -> usize {
    p.len()
}
