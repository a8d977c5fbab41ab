//! Point-cloud, embedding and dataset file formats.

mod dataset;
mod embedding;
mod ply;
mod scan;
mod xyz;

use std::path::Path;

use thiserror::Error;

use crate::geom::PointCloud;

pub use dataset::{dataset_lengths, list_files};
pub use embedding::{read_embeddings, write_embeddings, EMBEDDING_MAGIC};
pub use ply::{read_ply, write_ply, PlyEncoding};
pub use scan::{ingest_scan, ScanTarget};
pub use xyz::{read_xyz, write_xyz};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Malformed(String),
    #[error("file contains no points")]
    Empty,
}

pub(crate) fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

/// Reads a PLY or XYZ file, chosen by extension (`.xyz`/`.txt` are XYZ,
/// anything else is PLY).
pub fn read_point_cloud(path: &Path) -> Result<PointCloud, FormatError> {
    let bytes = std::fs::read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let mut pc = match ext.as_str() {
        "xyz" | "txt" => read_xyz(&bytes)?,
        _ => read_ply(&bytes)?,
    };
    if pc.source_id.is_none() {
        pc.source_id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(pc)
}
