//! Reconstruction, validity, similarity, retrieval and generation metrics,
//! with sequence-length normalization and per-length report tables.

mod chamfer;
mod generation;
mod iou;
mod normalize;
mod recon;
mod report;
mod retrieval;

use thiserror::Error;

pub use chamfer::{chamfer_distance, chamfer_distance_with, CHAMFER_SCALE};
pub use generation::{generation_quality, generation_quality_with, GenerationQuality, JSD_GRID};
pub use iou::{iou_aligned, iou_per_rotation, octahedral_rotations, IouOptions, Rotation};
pub use normalize::{invalid_ratio, invalid_ratio_with, relative_improvement, sl_normalize, SlNormalized, Statistic};
pub use recon::{command_accuracy, param_accuracy, RowScope, DEFAULT_ETA};
pub use report::{ItemMetrics, MetricsReport, ReportConfig, ReportRow};
pub use retrieval::{pair_by_id, retrieval_topn, retrieval_topn_with, EmbeddingSet, RetrievalResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty input")]
    EmptyInput,
    #[error("solid has no volume")]
    EmptySolid,
    #[error("relative improvement is undefined when the baseline accuracy is 1")]
    DivisionByZero,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("non-finite embedding component")]
    NonFinite,
    #[error("batch size {batch} exceeds the {available} available pairs")]
    BatchTooLarge { batch: usize, available: usize },
    #[error("id sets differ: {0}")]
    IdMismatch(String),
}
